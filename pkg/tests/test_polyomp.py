import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from momentforge.dsparams import ds_forward
from momentforge.errors import DimensionError, LengthError, MomentMismatchError
from momentforge.hankel import MomentSequence
from momentforge.matkit import residual
from momentforge.measures import AtomicMeasure
from momentforge.parametrize import random_spd_sequence
from momentforge.polyomp import (
    MatrixPoly,
    abcd_polys,
    ds_conjugation_check,
    gram_schmidt_monic,
    monic_orthogonality_check,
    monic_system_check,
    omp_quadruple,
    omp_values_at_zero,
    shift_matrix,
    shift_resolvent,
    transform_orthogonality_check,
    transform_poly_identities,
    values_at_zero,
)


def _coeffs(p):
    """Scalar coefficients, lowest degree first, trailing zeros dropped"""
    c = [complex(a[0, 0]) for a in p.coeffs]
    while len(c) > 1 and abs(c[-1]) < 1e-12:
        c.pop()
    return np.array(c)


def test_matrix_poly_arithmetic():
    p = MatrixPoly.from_list([np.eye(2), 2 * np.eye(2)])  # I + 2z I
    np.testing.assert_allclose(p(3.0), 7 * np.eye(2))
    assert p.degree() == 1
    assert MatrixPoly.zero(2).degree() == -1
    np.testing.assert_allclose(p.mul_z()(2.0), 10 * np.eye(2))
    np.testing.assert_allclose((p - p)(1.5), np.zeros((2, 2)))
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(p.lmul(a)(1.0), 3 * a)
    np.testing.assert_allclose(p.rmul(a)(1.0), 3 * a)
    big = MatrixPoly.assemble([[p, MatrixPoly.zero(2)], [MatrixPoly.zero(2), p]])
    assert big.rows == 4
    np.testing.assert_allclose(big.block(1, 1, 2)(1.0), 3 * np.eye(2))
    back = MatrixPoly.from_json(p.to_json())
    np.testing.assert_array_equal(back.coeffs, p.coeffs)
    with pytest.raises(DimensionError):
        p + MatrixPoly.zero(3)


def test_shift_resolvent_inverts():
    for z in (0.5, 1j, -2.0):
        r = shift_resolvent(3, 2)(z)
        np.testing.assert_allclose(r @ (np.eye(8) - z * shift_matrix(3, 2)), np.eye(8), atol=1e-12)


@pytest.mark.parametrize(
    "family, n, expected",
    [
        ("pH", 1, [-1, 1]),
        ("pH", 2, [2, -4, 1]),
        ("qH", 1, [1]),
        ("qH", 2, [-3, 1]),
        ("pK", 1, [-2, 1]),
        ("qK", 1, [-1, 1]),
        ("qK", 0, [1]),
    ],
)
def test_factorial_polynomials(factorial, family, n, expected):
    quad = omp_quadruple(factorial)
    np.testing.assert_allclose(_coeffs(getattr(quad, family)[n]), expected, atol=1e-9)


def test_quadruple_sizes(factorial):
    quad = omp_quadruple(factorial)
    assert (len(quad.pH), len(quad.pK)) == (4, 3)
    with pytest.raises(LengthError):
        omp_quadruple(factorial.truncate(2), 2)


def test_resolvent_blocks_of_factorial(factorial):
    alpha, beta, gamma, delta = abcd_polys(factorial, 1)
    np.testing.assert_allclose(_coeffs(alpha), [1, -1], atol=1e-9)
    np.testing.assert_allclose(_coeffs(gamma), [0, -2, 1], atol=1e-9)
    np.testing.assert_allclose(_coeffs(beta), [1], atol=1e-9)
    np.testing.assert_allclose(_coeffs(delta), [1, -1], atol=1e-9)


def test_monic_systems_of_factorial(factorial):
    quad = omp_quadruple(factorial)
    assert monic_system_check(quad.pH[:3], factorial, "H").worst() < 1e-9
    assert monic_system_check(quad.pK[:3], factorial, "K").worst() < 1e-9
    with pytest.raises(ValueError):
        monic_system_check(quad.pH[:2], factorial, "X")


def test_gram_schmidt_agrees(factorial):
    quad = omp_quadruple(factorial)
    for n, p in enumerate(gram_schmidt_monic(factorial, 2)):
        assert residual(p(1.5 + 0.5j), quad.pH[n](1.5 + 0.5j)) < 1e-9


def test_orthogonality_under_gauss_laguerre(gauss_laguerre):
    seq = MomentSequence.scalar([1, 1, 2, 6])
    quad = omp_quadruple(seq)
    assert monic_orthogonality_check(quad.pH[:2], gauss_laguerre, "H", seq).worst() < 1e-9
    assert monic_orthogonality_check(quad.pK[:2], gauss_laguerre, "K", seq).worst() < 1e-9


def test_orthogonality_needs_matching_measure(factorial):
    quad = omp_quadruple(factorial)
    with pytest.raises(MomentMismatchError):
        monic_orthogonality_check(quad.pH[:2], AtomicMeasure.scalar([1.0], [1.0]), "H", factorial)


def test_values_at_zero_from_ds(factorial):
    quad = omp_quadruple(factorial)
    ds = ds_forward(factorial)
    for n in range(3):
        a, b = omp_values_at_zero(ds, n), values_at_zero(quad, n)
        assert residual(a[0], b[0]) < 1e-9
        assert residual(a[1], b[1]) < 1e-9


@pytest.mark.parametrize("n", [1, 2])
def test_first_transform_identities_factorial(factorial, n):
    rows = transform_poly_identities(factorial, n)
    assert "values_at_zero_first_kind" in rows
    assert max(rows.values()) < 1e-9


def test_transform_orthogonality_factorial(factorial):
    rows = transform_orthogonality_check(factorial, 3)
    assert set(rows) == {"second_kind_K_under_transform_H", "second_kind_H_under_transform_K"}
    assert max(rows.values()) < 1e-9


@pytest.mark.parametrize("m, k", [(0, 0), (0, 2), (1, 1), (1, 2)])
def test_ds_conjugation_random(m, k):
    seq = random_spd_sequence(2, 7, seed=99)
    rows = ds_conjugation_check(seq, m, k)
    assert rows
    assert max(rows.values()) < 1e-8


def test_ds_conjugation_needs_k_at_least_m(factorial):
    with pytest.raises(LengthError):
        ds_conjugation_check(factorial, 2, 1)


@settings(max_examples=12, deadline=None)
@given(integers(min_value=0, max_value=2 ** 32 - 1), integers(min_value=1, max_value=3), integers(min_value=2, max_value=8))
def test_random_polynomial_identities(seed, q, m):
    seq = random_spd_sequence(q, m, seed)
    quad = omp_quadruple(seq)
    assert monic_system_check(quad.pH[: m // 2 + 1], seq, "H").worst() < 1e-8
    assert max(transform_poly_identities(seq, m // 2).values()) < 1e-8
