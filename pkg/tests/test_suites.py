import pytest

from momentforge.hankel import MomentSequence
from momentforge.matkit import DEFAULT_TOL, TolerancePolicy
from momentforge.parametrize import random_spd_sequence
from momentforge.suites import SUITES, CheckRow, run_suite


def _failures(rows):
    return [(row.name, row.residual, row.detail) for row in rows if not row.passed]


def test_factorial_passes_every_suite(factorial):
    rows = run_suite(factorial, "all")
    assert rows[0].name == "positive_definite"
    assert not _failures(rows)
    names = {row.name.split(".")[0] for row in rows}
    assert {"sp_round_trip", "three_way[m=3]", "continued_fraction", "extremal_moments"} <= names


@pytest.mark.parametrize("suite", [s for s in SUITES if s != "all"])
def test_single_suites_on_factorial(factorial, suite):
    rows = run_suite(factorial, suite)
    assert len(rows) > 1
    assert not _failures(rows)


def test_indefinite_input_stops_after_the_parametrization():
    seq = MomentSequence.scalar([1, 1, 0.5, 6])
    rows = run_suite(seq, "all")
    assert rows[0].name == "positive_definite" and not rows[0].passed
    assert not any(row.name.startswith(("three_way", "continued_fraction")) for row in rows)
    assert len(run_suite(seq, "omp")) == 1


def test_unknown_suite(factorial):
    with pytest.raises(ValueError):
        run_suite(factorial, "everything")


def test_matrix_valued_data_passes():
    rows = run_suite(random_spd_sequence(2, 5, seed=3), "all")
    assert not _failures(rows)
    assert not any(row.name.startswith("extremal_moments") for row in rows)


def test_tighter_tolerance_flows_into_rows(factorial):
    tol = TolerancePolicy(rtol_identity=1e-6)
    assert all(row.tolerance == 1e-6 for row in run_suite(factorial, "sp", tol))
    assert DEFAULT_TOL.rtol_identity != 1e-6


def test_row_json_spells_out_infinity():
    row = CheckRow("x", float("inf"), 1e-8, False, "src", "boom")
    assert row.to_json()["residual"] == "inf"
    assert row.to_json()["pass"] is False


@pytest.mark.parametrize("q, m", [(1, 8), (2, 8), (3, 8), (2, 10)])
def test_witness_rows_pass_on_larger_orders(q, m):
    rows = run_suite(random_spd_sequence(q, m, seed=q + m), "measures")
    witness = [row for row in rows if row.name.startswith("witness_")]
    assert {row.name.split(".")[0] for row in witness} == {"witness_transform_positivity", "witness_orthogonality"}
    assert not _failures(witness)


def test_suite_timings_are_collected(factorial):
    timings = {}
    run_suite(factorial, "all", timings=timings)
    assert set(timings) == {s for s in SUITES if s != "all"}
    one = {}
    run_suite(factorial, "sp", timings=one)
    assert list(one) == ["sp"]
