import math

import numpy as np
import pytest

from momentforge.hankel import MomentSequence
from momentforge.matkit import DEFAULT_TOL
from momentforge.measures import AtomicMeasure


@pytest.fixture
def tol():
    return DEFAULT_TOL


@pytest.fixture
def factorial():
    """Moments of e^{-t} dt on [0, inf): s_j = j!"""
    return MomentSequence.scalar([math.factorial(j) for j in range(6)])


@pytest.fixture
def two_atom():
    """delta_1 + delta_2: s_j = 1 + 2^j"""
    return MomentSequence.scalar([1 + 2 ** j for j in range(4)])


@pytest.fixture
def gauss_laguerre():
    r = math.sqrt(2.0)
    return AtomicMeasure.scalar([2 - r, 2 + r], [(2 + r) / 4, (2 - r) / 4])


@pytest.fixture
def unit_atom_q2():
    """delta_0 with weight I_2"""
    return AtomicMeasure(2, ((0.0, np.eye(2)),))
