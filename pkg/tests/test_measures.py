import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from momentforge.dsparams import ds_forward
from momentforge.errors import (
    ClassificationError,
    DimensionError,
    DomainError,
    LengthError,
    RecoveryError,
    ScopeError,
    StructureError,
)
from momentforge.hankel import MomentSequence, classify_by_definition
from momentforge.matkit import residual
from momentforge.measures import (
    AtomicMeasure,
    ConstantPair,
    RationalMatrixFn,
    continued_fraction_eval,
    extremal_measure,
    extremal_moment_check,
    extremal_transform_relation_check,
    extremal_transforms,
    inequality_membership_check,
    lft_constant_pair,
    measure_moments,
    random_atomic_measure,
    recover_scalar_measure,
    shifted_measure,
    stieltjes_transform,
    transform_positivity_check,
)
from momentforge.polyomp import MatrixPoly, omp_quadruple
from momentforge.resolvent import resolvent_direct

UPPER = (1j, -1.0 + 1j, 0.5 + 2j, 3.0 + 1j)


def _scalar_fraction(num, den):
    as_poly = lambda c: MatrixPoly.from_list([np.array([[a]], dtype=complex) for a in c])
    return RationalMatrixFn(as_poly(num), as_poly(den))


def _moments(mu, upto):
    return [s[0, 0].real for s in measure_moments(mu, upto).moments]


def test_atom_validation():
    mu = AtomicMeasure.scalar([2.0, 1.0], [1.0, 1.0])
    assert mu.nodes == [1.0, 2.0]
    with pytest.raises(DomainError):
        AtomicMeasure.scalar([-1.0], [1.0])
    with pytest.raises(ClassificationError):
        AtomicMeasure.scalar([1.0], [-1.0])
    with pytest.raises(StructureError):
        AtomicMeasure.scalar([1.0, 1.0], [1.0, 2.0])
    with pytest.raises(DimensionError):
        AtomicMeasure(2, ((1.0, np.eye(3)),))
    back = AtomicMeasure.from_json(mu.to_json())
    assert back.nodes == mu.nodes


def test_moments_of_two_atoms(two_atom):
    mu = AtomicMeasure.scalar([1.0, 2.0], [1.0, 1.0])
    assert _moments(mu, 3) == [s[0, 0].real for s in two_atom.moments]
    with pytest.raises(LengthError):
        measure_moments(mu, -1)


def test_gauss_laguerre_moments(gauss_laguerre):
    np.testing.assert_allclose(_moments(gauss_laguerre, 4), [1, 1, 2, 6, 20], atol=1e-9)


def test_stieltjes_transform_values(unit_atom_q2):
    np.testing.assert_allclose(stieltjes_transform(AtomicMeasure.scalar([1.0], [1.0]), -1.0), [[0.5]])
    np.testing.assert_allclose(stieltjes_transform(unit_atom_q2, 1j), 1j * np.eye(2), atol=1e-15)
    with pytest.raises(DomainError):
        stieltjes_transform(unit_atom_q2, 0.0)


def test_shifted_measure_drops_the_origin():
    mu = AtomicMeasure.scalar([0.0, 3.0], [2.0, 1.0])
    shifted = shifted_measure(mu)
    assert shifted.nodes == [3.0]
    assert shifted.weights[0][0, 0] == 3.0


def test_constant_pair_validation():
    assert ConstantPair.lower(2).q == 2
    with pytest.raises(ClassificationError):
        ConstantPair(np.zeros((1, 1)), np.zeros((1, 1)))
    with pytest.raises(ClassificationError):
        ConstantPair(np.eye(1), -np.eye(1))
    with pytest.raises(ClassificationError):
        ConstantPair(np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionError):
        ConstantPair(np.eye(2), np.eye(1))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_constant_pairs_give_the_extremal_solutions(factorial, m):
    U = resolvent_direct(factorial, m)
    s_min, s_max = extremal_transforms(omp_quadruple(factorial.truncate(m)), m)
    for z in UPPER:
        assert residual(lft_constant_pair(U, ConstantPair.lower(1), z), s_min(z)) < 1e-9
        assert residual(lft_constant_pair(U, ConstantPair.upper(1), z), s_max(z)) < 1e-9


def test_constant_pair_size_must_match(factorial):
    with pytest.raises(DimensionError):
        lft_constant_pair(resolvent_direct(factorial, 1), ConstantPair.lower(2), 1j)


def test_continued_fraction_matches_closed_forms(factorial):
    ds = ds_forward(factorial)
    for z in UPPER:
        s_max = -(z - 3) / (z * z - 4 * z + 2)
        s_min = -(z - 1) / (z * (z - 2))
        assert abs(continued_fraction_eval(ds, 2, z, "max")[0, 0] - s_max) < 1e-9
        assert abs(continued_fraction_eval(ds, 1, z, "min")[0, 0] - s_min) < 1e-9
    np.testing.assert_array_equal(continued_fraction_eval(ds, 0, 1j, "max"), np.zeros((1, 1)))


def test_continued_fraction_arguments(factorial):
    ds = ds_forward(factorial)
    with pytest.raises(ValueError):
        continued_fraction_eval(ds, 1, 1j, "mid")
    with pytest.raises(LengthError):
        continued_fraction_eval(ds, 3, 1j, "min")


def test_recover_gauss_laguerre():
    mu = recover_scalar_measure(_scalar_fraction([3, -1], [2, -4, 1]))
    r = math.sqrt(2.0)
    np.testing.assert_allclose(mu.nodes, [2 - r, 2 + r], atol=1e-12)
    np.testing.assert_allclose([w[0, 0].real for w in mu.weights], [(2 + r) / 4, (2 - r) / 4], atol=1e-9)


def test_recover_point_mass_at_origin():
    mu = recover_scalar_measure(_scalar_fraction([-1], [0, 1]))
    assert mu.nodes == [0.0]
    assert abs(mu.weights[0][0, 0] - 1.0) < 1e-12
    assert len(recover_scalar_measure(_scalar_fraction([0], [1]))) == 0


@pytest.mark.parametrize(
    "num, den",
    [
        ([1], [1, 1]),  # pole at -1
        ([1], [1, 0, 1]),  # poles at +-i
        ([1], [0, 1]),  # negative residue at 0
        ([1], [2]),  # constant, nonzero
    ],
)
def test_recovery_failures(num, den):
    with pytest.raises(RecoveryError):
        recover_scalar_measure(_scalar_fraction(num, den))


def test_recovery_is_scalar_only():
    two = MatrixPoly.constant(np.eye(2))
    with pytest.raises(ScopeError):
        recover_scalar_measure(RationalMatrixFn(two, two))


def test_extremal_measures_of_factorial(factorial):
    mu_max = extremal_measure(factorial, 3)
    np.testing.assert_allclose(_moments(mu_max, 4), [1, 1, 2, 6, 20], atol=1e-9)
    mu_min = extremal_measure(factorial, 2)
    np.testing.assert_allclose(mu_min.nodes, [0.0, 2.0], atol=1e-9)
    np.testing.assert_allclose(_moments(mu_min, 4), [1, 1, 2, 4, 8], atol=1e-9)


def test_extremal_measure_arguments(factorial):
    with pytest.raises(LengthError):
        extremal_measure(factorial, 6)
    with pytest.raises(ValueError):
        extremal_measure(factorial, 2, "mid")
    with pytest.raises(ScopeError):
        extremal_measure(MomentSequence(2, (np.eye(2), np.eye(2), 2 * np.eye(2))), 2)
    with pytest.raises(ClassificationError):
        extremal_measure(MomentSequence.scalar([1, 1, 1]), 2)


@pytest.mark.parametrize("m", range(6))
def test_extremal_moments_follow_the_zero_extension(factorial, m):
    assert extremal_moment_check(factorial, m)["extremal_moments"] < 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_extremal_solutions_under_the_first_transform(factorial, n):
    rows = extremal_transform_relation_check(factorial, n)
    assert set(rows) == {"transform_min_from_max", "transform_max_from_min"}
    assert max(rows.values()) < 1e-9
    with pytest.raises(LengthError):
        extremal_transform_relation_check(factorial, 3)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_extremal_measures_sit_on_the_boundary(factorial, m):
    rows = inequality_membership_check(factorial, m)
    assert max(rows.values()) < 1e-8


def test_random_measure_is_deterministic():
    a, b = random_atomic_measure(2, 3, seed=8), random_atomic_measure(2, 3, seed=8)
    assert a.nodes == b.nodes
    with pytest.raises(DimensionError):
        random_atomic_measure(0, 2, seed=1)


@settings(max_examples=15, deadline=None)
@given(integers(min_value=0, max_value=2 ** 32 - 1), integers(min_value=1, max_value=3), integers(min_value=1, max_value=4))
def test_random_measures_have_positive_transforms(seed, q, atoms):
    mu = random_atomic_measure(q, atoms, seed)
    rows = transform_positivity_check(mu, UPPER)
    assert max(rows.values()) < 1e-10
    assert classify_by_definition(measure_moments(mu, 2 * atoms - 2)).pos_definite
