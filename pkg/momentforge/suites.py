"""
Verification suites: named groups of identity checks run against one
moment sequence, each producing CheckRow records.
"""

import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .dsparams import (
    ds_forward,
    ds_from_sp,
    ds_of_transform,
    ds_shift_check,
    product_identity_check,
    scalar_ks_params,
    sp_from_ds,
)
from .errors import MomentForgeError
from .hankel import classify_by_definition
from .logs import get_logger
from .matkit import DEFAULT_TOL, norm2, residual
from .measures import (
    ConstantPair,
    continued_fraction_eval,
    extremal_moment_check,
    extremal_transform_relation_check,
    extremal_transforms,
    inequality_membership_check,
    lft_constant_pair,
    measure_moments,
    random_atomic_measure,
    transform_positivity_check,
)
from .parametrize import classify_from_sp, sp_forward, sp_inverse, zero_extension
from .polyomp import (
    DEFAULT_SAMPLES,
    ds_conjugation_check,
    gram_schmidt_monic,
    monic_orthogonality_check,
    monic_system_check,
    omp_quadruple,
    omp_values_at_zero,
    transform_orthogonality_check,
    transform_poly_identities,
    values_at_zero,
)
from .resolvent import intertwine_check, resolvent_direct, splitting_check, three_way_check
from .schur import (
    class_preservation_check,
    parametrization_swap_check,
    reciprocal,
    tail_class_check,
    transform1,
    transform_shift_check,
)

log = get_logger("suites")

SUITES = ("sp", "ds", "schur", "omp", "resolvent", "measures", "all")
# highest degree of p_H checked against the witness measure
WITNESS_DEGREE = 3


@dataclass(frozen=True)
class CheckRow:
    name: str
    residual: float
    tolerance: float
    passed: bool
    source: str = ""
    detail: str = ""

    def to_json(self):
        return {
            "name": self.name,
            "residual": self.residual if np.isfinite(self.residual) else "inf",
            "tolerance": self.tolerance,
            "pass": self.passed,
            "source": self.source,
            "detail": self.detail,
        }


class _Collector:
    """Runs checks and turns their results (float, dict of floats, bool) into rows."""

    def __init__(self, tol):
        self.tol = tol
        self.rows: List[CheckRow] = []

    def _failed(self, name, source, err):
        log.warning(f"{name} failed: {err}")
        self.rows.append(CheckRow(name, float("inf"), self.tol.rtol_identity, False, source, str(err)))

    def measure(self, name, source, fn: Callable):
        try:
            value = fn()
        except (MomentForgeError, np.linalg.LinAlgError) as e:
            self._failed(name, source, e)
            return
        items = value.items() if isinstance(value, dict) else [(None, value)]
        for key, res in items:
            res = float(res)
            label = name if key is None else f"{name}.{key}"
            passed = bool(np.isfinite(res) and res <= self.tol.rtol_identity)
            if not passed:
                log.warning(f"{label}: residual {res:.3e} above {self.tol.rtol_identity:.1e}")
            self.rows.append(CheckRow(label, res, self.tol.rtol_identity, passed, source))

    def flag(self, name, source, fn: Callable):
        try:
            ok = bool(fn())
        except (MomentForgeError, np.linalg.LinAlgError) as e:
            self._failed(name, source, e)
            return
        if not ok:
            log.warning(f"{name}: condition does not hold")
        self.rows.append(CheckRow(name, 0.0 if ok else float("inf"), self.tol.rtol_identity, ok, source))


def _max_residual(pairs):
    return max((residual(a, b) for a, b in pairs), default=0.0)


def _sp_rows(seq, c, z_samples):
    tol = c.tol
    m = seq.order
    c.measure("sp_round_trip", "moments rebuilt from the Schur complement parametrization",
              lambda: _max_residual(zip(sp_inverse(sp_forward(seq, tol), tol).moments, seq.moments)))

    def agree():
        a = classify_by_definition(seq, tol)
        b = classify_from_sp(sp_forward(seq, tol), tol)
        return (a.nonneg_definite, a.pos_definite) == (b.nonneg_definite, b.pos_definite)

    c.flag("class_agreement", "class read off the Hankel blocks vs off the parametrization", agree)

    def zero_tail():
        ext = zero_extension(seq, m + 2, tol)
        tail = sp_forward(ext, tol).params[m + 1:]
        prefix = _max_residual(zip(ext.moments[: m + 1], seq.moments))
        return max(prefix, max(norm2(p) for p in tail) / (1.0 + max(norm2(s) for s in seq.moments)))

    c.measure("zero_extension", "zero-extension keeps the data and continues with vanishing parameters", zero_tail)


def _ds_rows(seq, c, z_samples):
    tol = c.tol
    m = seq.order

    def forward_vs_sp():
        a, b = ds_forward(seq, tol), ds_from_sp(sp_forward(seq, tol), tol)
        return max(_max_residual(zip(a.lengths, b.lengths)), _max_residual(zip(a.masses, b.masses)))

    c.measure("ds_from_blocks_vs_parametrization", "lengths and masses from H_k/K_k inverses vs from Q_j", forward_vs_sp)
    c.measure("sp_from_ds_round_trip", "parametrization recovered from lengths and masses",
              lambda: _max_residual(zip(sp_from_ds(ds_forward(seq, tol), tol).params, sp_forward(seq, tol).params)))
    c.measure("product_identity", "prefix products of Q_j against products of M_j L_j",
              lambda: product_identity_check(seq, tol))
    if m >= 1:
        def transform_ds():
            predicted = ds_of_transform(ds_forward(seq, tol), seq[0], tol)
            actual = ds_forward(transform1(seq, tol), tol)
            return max(_max_residual(zip(predicted.lengths, actual.lengths)), _max_residual(zip(predicted.masses, actual.masses)))

        c.measure("ds_of_first_transform", "lengths and masses of the first Schur transform from those of s", transform_ds)
    for ell in range(2):
        for k in range(3):
            if m < ell + 2 * k + 2:
                break
            c.measure(f"ds_shift[ell={ell},k={k}]", "lengths and masses of the ell-th transform in closed form",
                      lambda ell=ell, k=k: ds_shift_check(seq, ell, k, 1, tol))
    if seq.q == 1:
        def determinant_route():
            lengths, masses = scalar_ks_params(seq, tol)
            ds = ds_forward(seq, tol)
            out = [abs(lengths[k] - ds.lengths[k][0, 0]) / (1.0 + abs(lengths[k])) for k in range(len(lengths))]
            out += [abs(masses[k] - ds.masses[k][0, 0]) / (1.0 + abs(masses[k])) for k in range(len(masses))]
            return max(out)

        c.measure("scalar_determinant_route", "scalar lengths and masses from Hankel determinants", determinant_route)


def _schur_rows(seq, c, z_samples):
    tol = c.tol
    m = seq.order

    def convolution():
        rec = reciprocal(seq, tol)
        worst = residual(seq[0] @ rec[0] @ seq[0], seq[0])
        for j in range(1, m + 1):
            acc = sum(seq[j - l] @ rec[l] for l in range(j + 1))
            worst = max(worst, residual(acc, np.zeros_like(acc), seq[0]))
        return worst

    c.measure("reciprocal_convolution", "reciprocal sequence inverts s under convolution", convolution)
    for k in range(1, min(m, 3) + 1):
        c.measure(f"transform_shift[k={k}]", "parametrization of the k-th transform is the k-shifted parametrization",
                  lambda k=k: transform_shift_check(seq, k, tol))
    if m >= 1:
        c.measure("parametrization_swap", "first transform swaps the two Schur complement families",
                  lambda: parametrization_swap_check(seq, tol))
        c.flag("tail_class", "dropping s_0 keeps positive definiteness", lambda: tail_class_check(seq, tol))
        c.flag("class_preservation[k=1]", "first transform keeps the class and shifts the degenerate order",
               lambda: class_preservation_check(seq, 1, tol).passed)


def _omp_rows(seq, c, z_samples):
    tol = c.tol
    m = seq.order
    quad = omp_quadruple(seq, None, tol)
    c.measure("monic_system_H", "p_H polynomials are a monic orthogonal system under H",
              lambda: monic_system_check(quad.pH[: m // 2 + 1], seq, "H", tol).worst())
    if m >= 1:
        c.measure("monic_system_K", "p_K polynomials are a monic orthogonal system under K",
                  lambda: monic_system_check(quad.pK[: (m - 1) // 2 + 1], seq, "K", tol).worst())

    def gram_schmidt():
        gs = gram_schmidt_monic(seq, m // 2, "H", tol)
        return max(_max_residual(zip(a.coeffs, quad.pH[n].coeffs)) for n, a in enumerate(gs))

    c.measure("gram_schmidt_H", "block Gram-Schmidt reproduces p_H", gram_schmidt)

    def zero_values():
        ds = ds_forward(seq, tol)
        worst = 0.0
        for n in range(min(len(ds.lengths), len(ds.masses) - 1, len(quad.pK) - 1) + 1):
            a = omp_values_at_zero(ds, n, tol)
            b = values_at_zero(quad, n)
            worst = max(worst, residual(a[0], b[0]), residual(a[1], b[1]))
        return worst

    c.measure("values_at_zero", "p_H(0) and q_K(0) from products of masses and lengths", zero_values)
    for n in range(1, m // 2 + 1):
        c.measure(f"transform_polynomials[n={n}]", "polynomials of the first transform from those of s",
                  lambda n=n: transform_poly_identities(seq, n, z_samples, tol))
    if m >= 1:
        c.measure("transform_orthogonality", "scaled second-kind polynomials are orthogonal for the first transform",
                  lambda: transform_orthogonality_check(seq, m, tol))
    for k in range((m - 1) // 2 + 1 if m >= 1 else 0):
        c.measure(f"ds_conjugation[m={k},k={k}]", "lengths and masses of the 2m-th and (2m+1)-th transforms",
                  lambda k=k: ds_conjugation_check(seq, k, k, tol))


def _resolvent_rows(seq, c, z_samples):
    tol = c.tol
    m = seq.order
    for order in range(m + 1):
        c.measure(f"three_way[m={order}]", "block formulas, factor product and polynomial form of U_m",
                  lambda order=order: three_way_check(seq, order, z_samples, tol))
    if m >= 1:
        c.measure("intertwining[k=0]", "elementary factors conjugated through the transforms",
                  lambda: intertwine_check(seq, 0, m // 2, z_samples, tol))
        for ell in range(m):
            c.measure(f"splitting[m={m},ell={ell}]", "U_m factored through resolvents of the transforms",
                      lambda ell=ell: splitting_check(seq, m, ell, z_samples, tol))


def _sample_points(z_samples):
    return [complex(z) for z in (z_samples if z_samples is not None else DEFAULT_SAMPLES) if complex(z) != 0]


def _measure_rows(seq, c, z_samples):
    tol = c.tol
    m = seq.order
    q = seq.q
    points = _sample_points(z_samples)

    def lft_rows():
        worst = {"lower_pair": 0.0, "upper_pair": 0.0}
        for order in range(m + 1):
            U = resolvent_direct(seq, order, tol)
            s_min, s_max = extremal_transforms(omp_quadruple(seq.truncate(order), None, tol), order)
            for z in points:
                worst["lower_pair"] = max(worst["lower_pair"], residual(lft_constant_pair(U, ConstantPair.lower(q), z, tol), s_min(z, tol)))
                worst["upper_pair"] = max(worst["upper_pair"], residual(lft_constant_pair(U, ConstantPair.upper(q), z, tol), s_max(z, tol)))
        return worst

    c.measure("lft_constant_pairs", "constant pairs (I, 0) and (0, I) give the extremal solutions", lft_rows)

    def fraction_rows():
        ds = ds_forward(seq, tol)
        worst = {"min": 0.0, "max": 0.0}
        for n in range(m // 2 + 1):
            s_min = extremal_transforms(omp_quadruple(seq.truncate(2 * n), None, tol), 2 * n)[0]
            for z in points:
                worst["min"] = max(worst["min"], residual(continued_fraction_eval(ds, n, z, "min", tol), s_min(z, tol)))
        for n in range(1, (m + 1) // 2 + 1):
            s_max = extremal_transforms(omp_quadruple(seq.truncate(2 * n - 1), None, tol), 2 * n - 1)[1]
            for z in points:
                worst["max"] = max(worst["max"], residual(continued_fraction_eval(ds, n, z, "max", tol), s_max(z, tol)))
        return worst

    c.measure("continued_fraction", "continued fractions in lengths and masses equal the extremal solutions", fraction_rows)
    for n in range(1, m // 2 + 1):
        c.measure(f"extremal_under_transform[n={n}]", "extremal solutions of the first transform",
                  lambda n=n: extremal_transform_relation_check(seq, n, z_samples, tol))
    if q == 1:
        c.measure("extremal_moments", "recovered extremal measure matches the zero-extension",
                  lambda: extremal_moment_check(seq, m, tol))
        c.measure("inequality_membership", "extremal measures reproduce s_0..s_{m-1} and bound s_m",
                  lambda: inequality_membership_check(seq, m, tol))

    witness = random_atomic_measure(q, m // 2 + 2, seed=0)
    c.measure("witness_transform_positivity", "Stieltjes transform of an atomic measure is Stieltjes positive",
              lambda: transform_positivity_check(witness, z_samples))

    def witness_orthogonality():
        top = min(m // 2, WITNESS_DEGREE)
        moments = measure_moments(witness, 2 * top)
        quad = omp_quadruple(moments, None, tol)
        return monic_orthogonality_check(quad.pH[: top + 1], witness, "H", moments, tol).worst()

    c.measure("witness_orthogonality", "p_H of the moments of an atomic measure are orthogonal in its L2 space",
              witness_orthogonality)


_BUILDERS = {
    "sp": _sp_rows,
    "ds": _ds_rows,
    "schur": _schur_rows,
    "omp": _omp_rows,
    "resolvent": _resolvent_rows,
    "measures": _measure_rows,
}


def run_suite(seq, suite="all", tol=DEFAULT_TOL, z_samples=None, timings=None):
    """Rows of the named suite; the first row always records positive definiteness.

    Suites past the first row only run on positive definite input. When
    `timings` is a dict it receives the wall time of each suite that ran,
    keyed by suite name.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}, expected one of {', '.join(SUITES)}")
    c = _Collector(tol)
    c.flag("positive_definite", "H_n and K_n positive definite", lambda: classify_by_definition(seq, tol).pos_definite)
    if not c.rows[0].passed:
        if suite in ("sp", "all"):
            _sp_rows(seq, c, z_samples)
        return c.rows
    names = list(_BUILDERS) if suite == "all" else [suite]
    for name in names:
        start = time.perf_counter()
        log.info(f"suite {name} started (q={seq.q}, m={seq.order})")
        try:
            _BUILDERS[name](seq, c, z_samples)
        except (MomentForgeError, np.linalg.LinAlgError) as e:
            c._failed(f"{name}_setup", f"setup of suite {name}", e)
        elapsed = time.perf_counter() - start
        if timings is not None:
            timings[name] = elapsed
        log.info(f"suite {name} finished in {elapsed:.3f}s")
    return c.rows
