import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from momentforge.dsparams import ds_forward
from momentforge.errors import DomainError, LengthError
from momentforge.matkit import residual
from momentforge.parametrize import random_spd_sequence
from momentforge.polyomp import abcd_polys, omp_quadruple
from momentforge.resolvent import (
    TransformLadder,
    conjugation_factors,
    elementary_factors,
    factor_product,
    intertwine_check,
    resolvent_direct,
    resolvent_from_polys,
    splitting_check,
    three_way_check,
    transformed_resolvent,
)


@pytest.mark.parametrize(
    "m, z, expected",
    [
        (0, 0.0, [[1, 0], [0, 1]]),
        (1, 2.0, [[1, 1], [-2, -1]]),
        (2, 1j, [[1 - 1j, 1], [-1 - 2j, 1 - 1j]]),
    ],
)
def test_factorial_resolvent_values(factorial, m, z, expected):
    np.testing.assert_allclose(resolvent_direct(factorial, m)(z), np.array(expected, dtype=complex), atol=1e-9)


def test_corners_are_the_block_polynomials(factorial):
    U = resolvent_direct(factorial, 2)
    alpha, beta, gamma, delta = abcd_polys(factorial, 1)
    z = -0.5 + 0.25j
    for corner, poly in ((U.A, alpha), (U.B, beta), (U.C, gamma), (U.D, delta)):
        assert residual(corner(z), poly(z)) < 1e-12
    assert U.to_json()["m"] == 2


def test_factor_chain_layout(factorial):
    chain = elementary_factors(ds_forward(factorial), 3)
    assert [(f.kind, f.index) for f in chain.factors] == [("M", 0), ("L", 0), ("M", 1), ("L", 1)]
    assert len(chain.to_json()) == 4
    with pytest.raises(LengthError):
        elementary_factors(ds_forward(factorial), 6)


@pytest.mark.parametrize("m", range(6))
def test_three_constructions_agree_on_factorial(factorial, m):
    rows = three_way_check(factorial, m)
    assert {"identity_at_zero", "lengths_at_zero"} <= set(rows)
    assert max(rows.values()) < 1e-9


def test_polynomial_form_needs_enough_polynomials(factorial):
    quad = omp_quadruple(factorial.truncate(2))
    with pytest.raises(LengthError):
        resolvent_from_polys(quad, 4, 1j)


def test_conjugation_factors_are_invertible(factorial):
    pp, qq = conjugation_factors(omp_quadruple(factorial), 1)
    assert pp.shape == (2, 2)
    z = -1.0 + 1j
    assert abs(np.linalg.det(qq(z))) > 1e-6
    assert abs(np.linalg.det(pp)) > 1e-6


def test_ladder_caches_transforms(factorial):
    ladder = TransformLadder(factorial)
    assert ladder.sequence(2) is ladder.sequence(2)
    assert ladder.mass(7, 0, 1j) is None
    assert ladder.length(0, 9) is None
    with pytest.raises(LengthError):
        ladder.sequence(6)


def test_transformed_resolvent_at_level_zero(factorial):
    a = transformed_resolvent(factorial, 3, 0)
    b = resolvent_direct(factorial, 3)
    assert residual(a(0.3j), b(0.3j)) < 1e-12
    with pytest.raises(LengthError):
        transformed_resolvent(factorial, 3, 4)


@pytest.mark.parametrize("k", [0, 1])
def test_intertwining_on_random_matrix_data(k):
    seq = random_spd_sequence(2, 6, seed=5)
    rows = intertwine_check(seq, k, 2)
    assert {"swap_length", "swap_mass", "conjugation_length_even"} <= set(rows)
    assert max(rows.values()) < 1e-8


def test_intertwining_rejects_zero_only_samples(factorial):
    with pytest.raises(DomainError):
        intertwine_check(factorial, 0, 1, z_samples=[0.0])


@pytest.mark.parametrize("ell", range(4))
def test_splitting_on_random_matrix_data(ell):
    seq = random_spd_sequence(2, 4, seed=17)
    rows = splitting_check(seq, 4, ell)
    assert {"first_step", "step_at_ell", "double_step", "chain_product", "splitting"} == set(rows)
    assert max(rows.values()) < 1e-8


def test_splitting_index_range(factorial):
    with pytest.raises(LengthError):
        splitting_check(factorial, 3, 3)


@settings(max_examples=12, deadline=None)
@given(integers(min_value=0, max_value=2 ** 32 - 1), integers(min_value=1, max_value=3), integers(min_value=0, max_value=8))
def test_random_three_way(seed, q, m):
    seq = random_spd_sequence(q, m, seed)
    rows = three_way_check(seq, m)
    assert max(rows.values()) < 1e-8
    ds = ds_forward(seq)
    at_zero = factor_product(elementary_factors(ds, m), 0.0)
    assert residual(at_zero[:q, :q], np.eye(q)) < 1e-12
    assert residual(at_zero[q:, :q], np.zeros((q, q))) < 1e-12
    assert residual(at_zero[:q, q:], sum(ds.lengths, np.zeros((q, q)))) < 1e-9


@pytest.mark.parametrize("m, b0", [(0, 0.0), (1, 1.0), (3, 1.5), (5, 1.5 + 1 / 3)])
def test_value_at_zero_carries_the_lengths(factorial, m, b0):
    u0 = resolvent_direct(factorial, m)(0.0)
    np.testing.assert_allclose(u0, [[1, b0], [0, 1]], atol=1e-9)


def test_unused_helpers_stay_removed():
    from momentforge import hankel, matkit
    from momentforge.resolvent import FactorChain

    assert not hasattr(FactorChain, "evaluate")
    assert not hasattr(hankel.MomentSequence, "from_list")
    assert not any(hasattr(matkit, name) for name in ("eye", "zeros"))
