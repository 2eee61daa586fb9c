import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from momentforge.dsparams import (
    DSParams,
    ds_forward,
    ds_from_sp,
    ds_of_transform,
    ds_shift_check,
    product_identity_check,
    scalar_ks_params,
    sp_from_ds,
)
from momentforge.errors import LengthError, ScopeError
from momentforge.matkit import adjoint, residual
from momentforge.parametrize import StieltjesParam, random_spd_sequence, sp_forward
from momentforge.schur import transform1


def _sweep_tol(m):
    # H_4 and K_4 enter at m >= 9
    return 1e-8 if m <= 8 else 1e-6


def _scalars(mats):
    return [a[0, 0].real for a in mats]


def test_factorial_lengths_and_masses(factorial):
    ds = ds_forward(factorial)
    np.testing.assert_allclose(_scalars(ds.masses), [1, 1, 1], atol=1e-9)
    np.testing.assert_allclose(_scalars(ds.lengths), [1, 1 / 2, 1 / 3], atol=1e-9)
    assert ds.order == 5


def test_determinant_route_agrees(factorial):
    lengths, masses = scalar_ks_params(factorial)
    np.testing.assert_allclose(lengths, [1, 1 / 2, 1 / 3], rtol=1e-12)
    np.testing.assert_allclose(masses, [1, 1, 1], rtol=1e-12)


def test_determinant_route_is_scalar_only():
    with pytest.raises(ScopeError):
        scalar_ks_params(random_spd_sequence(2, 3, seed=0))


def test_parametrization_conversions(factorial):
    ds = ds_from_sp(sp_forward(factorial))
    np.testing.assert_allclose(_scalars(ds.lengths), [1, 1 / 2, 1 / 3], atol=1e-9)
    sp = sp_from_ds(ds_forward(factorial))
    np.testing.assert_allclose(_scalars(sp.params), [1, 1, 1, 2, 4, 12], atol=1e-8)


@pytest.mark.parametrize("n_masses, n_lengths, order", [(1, 0, 0), (1, 1, 1), (2, 1, 2), (3, 3, 5)])
def test_order_from_list_sizes(n_masses, n_lengths, order):
    ds = DSParams(1, tuple(np.eye(1) for _ in range(n_lengths)), tuple(np.eye(1) for _ in range(n_masses)))
    assert ds.order == order


def test_inconsistent_list_sizes():
    with pytest.raises(LengthError):
        DSParams(1, (np.eye(1),), (np.eye(1),) * 3)
    with pytest.raises(LengthError):
        DSParams(1, (), ())


def test_truncate_and_json(factorial):
    ds = ds_forward(factorial)
    short = ds.truncate(2)
    assert (len(short.masses), len(short.lengths)) == (2, 1)
    back = DSParams.from_json(ds.to_json())
    assert residual(back.lengths[2], ds.lengths[2]) == 0.0


def test_first_transform_parameters(factorial):
    predicted = ds_of_transform(ds_forward(factorial), factorial[0])
    actual = ds_forward(transform1(factorial))
    for a, b in zip(predicted.lengths + predicted.masses, actual.lengths + actual.masses):
        assert residual(a, b) < 1e-9


@pytest.mark.parametrize("ell, k, descent", [(0, 0, 1), (0, 1, 1), (1, 1, 1), (0, 2, 2), (1, 2, 1)])
def test_shift_relations_on_random_matrix_data(ell, k, descent):
    seq = random_spd_sequence(2, 8, seed=2024)
    rows = ds_shift_check(seq, ell, k, descent)
    assert {"closed_form_length", "closed_form_mass", "swap_length", "swap_mass"} <= set(rows)
    assert ("descent_mass" in rows) == (1 <= descent <= k)
    assert max(rows.values()) < 1e-8


def test_shift_relations_need_enough_moments(factorial):
    with pytest.raises(LengthError):
        ds_shift_check(factorial, 1, 2)


@settings(max_examples=50, deadline=None)
@given(integers(min_value=0, max_value=2 ** 32 - 1), integers(min_value=1, max_value=3), integers(min_value=1, max_value=10))
def test_two_routes_to_ds_parameters(seed, q, m):
    seq = random_spd_sequence(q, m, seed)
    a, b = ds_forward(seq), ds_from_sp(sp_forward(seq))
    assert (len(a.lengths), len(a.masses)) == (len(b.lengths), len(b.masses))
    for x, y in zip(a.lengths + a.masses, b.lengths + b.masses):
        assert residual(x, y) < _sweep_tol(m)
    assert product_identity_check(seq) < _sweep_tol(m)


@pytest.mark.parametrize("seed", range(5))
def test_block_route_at_order_eight(seed):
    seq = random_spd_sequence(2, 8, seed)
    a, b = ds_forward(seq), ds_from_sp(sp_forward(seq))
    assert max(residual(x, y) for x, y in zip(a.lengths + a.masses, b.lengths + b.masses)) < 1e-8


@settings(max_examples=50, deadline=None)
@given(integers(min_value=0, max_value=2 ** 32 - 1), integers(min_value=1, max_value=3), integers(min_value=0, max_value=10))
def test_parametrization_survives_the_ds_round_trip(seed, q, m):
    rng = np.random.default_rng(seed)
    params = []
    for _ in range(m + 1):
        g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        params.append(g @ adjoint(g) / (4 * q) + 0.5 * np.eye(q))
    sp = StieltjesParam(q, tuple(params))
    back = sp_from_ds(ds_from_sp(sp))
    assert back.order == m
    assert max(residual(a, b) for a, b in zip(back.params, sp.params)) < 1e-8
