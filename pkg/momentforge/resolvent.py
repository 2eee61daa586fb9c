"""
The 2q x 2q resolvent matrix U_m of the truncated Stieltjes problem.

Three independent constructions are provided (block formulas, product of
elementary factors built from DS parameters, orthogonal polynomials), plus
the conjugations that relate U_m of a sequence to the resolvents of its
Schur transforms.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import scipy.linalg

from .dsparams import ds_forward
from .errors import DomainError, LengthError
from .logs import get_logger
from .matkit import DEFAULT_TOL, adjoint, cmatrix_to_json, inverse, residual
from .polyomp import DEFAULT_SAMPLES, MatrixPoly, alpha_gamma, beta_delta, omp_quadruple, values_at_zero
from .schur import transform1

log = get_logger("resolvent")


@dataclass(frozen=True, eq=False)
class ResolventMatrix:
    """U_m as a 2q x 2q matrix polynomial with corners A, B, C, D."""

    m: int
    poly: MatrixPoly

    @property
    def q(self):
        return self.poly.rows // 2

    @property
    def A(self):
        return self.poly.block(0, 0, self.q)

    @property
    def B(self):
        return self.poly.block(0, 1, self.q)

    @property
    def C(self):
        return self.poly.block(1, 0, self.q)

    @property
    def D(self):
        return self.poly.block(1, 1, self.q)

    def __call__(self, z):
        return self.poly(z)

    def to_json(self):
        return {"m": self.m, "poly": self.poly.to_json()}


def mass_factor(mass, z):
    """[[I, 0], [-z M, I]]"""
    q = mass.shape[0]
    eye = np.eye(q, dtype=complex)
    return np.block([[eye, np.zeros((q, q))], [-z * mass, eye]])


def length_factor(length):
    """[[I, L], [0, I]]"""
    q = length.shape[0]
    eye = np.eye(q, dtype=complex)
    return np.block([[eye, length], [np.zeros((q, q)), eye]])


@dataclass(frozen=True, eq=False)
class ElementaryFactor:
    kind: str
    index: int
    matrix: np.ndarray

    def __call__(self, z):
        if self.kind == "M":
            return mass_factor(self.matrix, z)
        return length_factor(self.matrix)

    def to_json(self):
        return {"kind": self.kind, "index": self.index, "matrix": cmatrix_to_json(self.matrix)}


@dataclass(frozen=True, eq=False)
class FactorChain:
    """M_0, L_0, M_1, L_1, ... in multiplication order"""

    factors: Tuple[ElementaryFactor, ...]

    def __len__(self):
        return len(self.factors)

    def to_json(self):
        return [f.to_json() for f in self.factors]


def resolvent_direct(seq, m, tol=DEFAULT_TOL):
    """U_m from the alpha/beta/gamma/delta block formulas."""
    if m < 0 or m > seq.order:
        raise LengthError(f"U_{m} needs order >= {m}, got {seq.order}")
    n = m // 2
    alpha, gamma = alpha_gamma(seq, n, tol)
    beta, delta = beta_delta(seq, n if m % 2 == 0 else n + 1, tol)
    return ResolventMatrix(m, MatrixPoly.assemble([[alpha, beta], [gamma, delta]]))


def elementary_factors(ds, m):
    if m < 0 or m > ds.order:
        raise LengthError(f"U_{m} needs DS parameters of order >= {m}, got {ds.order}")
    factors = []
    for i in range(m + 1):
        if i % 2 == 0:
            factors.append(ElementaryFactor("M", i // 2, ds.masses[i // 2]))
        else:
            factors.append(ElementaryFactor("L", (i - 1) // 2, ds.lengths[(i - 1) // 2]))
    return FactorChain(tuple(factors))


def factor_product(chain, z):
    """Left-to-right product of the chain evaluated at z"""
    out = None
    for f in chain.factors:
        out = f(z) if out is None else out @ f(z)
    return out


def resolvent_from_polys(quad, m, z, tol=DEFAULT_TOL):
    """U_m(z) assembled from the orthogonal polynomials and their values at zero."""
    n = m // 2
    h = n if m % 2 == 0 else n + 1
    if h >= len(quad.pH) or n >= len(quad.pK):
        raise LengthError(f"U_{m} needs p_H up to {h} and p_K up to {n}")
    qK, pK, qH, pH = quad.qK[n], quad.pK[n], quad.qH[h], quad.pH[h]
    left = np.block([[qK(z), -qH(z)], [-z * pK(z), pH(z)]])
    right = scipy.linalg.block_diag(
        inverse(qK(0.0), tol, name=f"q_K{n}(0)"),
        inverse(pH(0.0), tol, name=f"p_H{h}(0)"),
    )
    return left @ right


def conjugation_factors(quad, n, tol=DEFAULT_TOL):
    """P~_n = diag(p_{H,n}(0)^{-*}, p_{H,n}(0)) and z -> Q~_n(z) = [[0, c], [-z c^{-*}, 0]], c = q_{K,n}(0).

    Pass the quadruple of the ell-th transform to get the superscript-ell versions.
    """
    ph0, qk0 = values_at_zero(quad, n)
    pp = scipy.linalg.block_diag(adjoint(inverse(ph0, tol, name=f"p_H{n}(0)")), ph0)
    qk0_inv_adj = adjoint(inverse(qk0, tol, name=f"q_K{n}(0)"))
    q = qk0.shape[0]

    def qq(z):
        zero = np.zeros((q, q), dtype=complex)
        return np.block([[zero, qk0], [-z * qk0_inv_adj, zero]])

    return pp, qq


class TransformLadder:
    """Lazily computed Schur transforms of one sequence with their DS parameters."""

    def __init__(self, seq, tol=DEFAULT_TOL):
        self.tol = tol
        self._seqs = {0: seq}
        self._ds = {}

    @property
    def depth(self):
        return self._seqs[0].order

    def sequence(self, ell):
        if ell > self.depth:
            raise LengthError(f"transform {ell} of an order {self.depth} sequence does not exist")
        while ell not in self._seqs:
            top = max(self._seqs)
            self._seqs[top + 1] = transform1(self._seqs[top], self.tol)
        return self._seqs[ell]

    def ds(self, ell):
        if ell not in self._ds:
            self._ds[ell] = ds_forward(self.sequence(ell), self.tol)
        return self._ds[ell]

    def mass(self, ell, k, z):
        if ell > self.depth:
            return None
        masses = self.ds(ell).masses
        return mass_factor(masses[k], z) if 0 <= k < len(masses) else None

    def length(self, ell, k):
        if ell > self.depth:
            return None
        lengths = self.ds(ell).lengths
        return length_factor(lengths[k]) if 0 <= k < len(lengths) else None

    def swap_factor(self, ell, z):
        """Q~_0 of the ell-th transform, built from its first moment"""
        s0 = self.sequence(ell)[0]
        q = s0.shape[0]
        zero = np.zeros((q, q), dtype=complex)
        return np.block([[zero, s0], [-z * adjoint(inverse(s0, self.tol, name=f"s_0^({ell})")), zero]])

    def chain(self, n, z):
        """Q~_0^(0) Q~_0^(1) ... Q~_0^(n)"""
        out = self.swap_factor(0, z)
        for ell in range(1, n + 1):
            out = out @ self.swap_factor(ell, z)
        return out


def _nonzero_samples(z_samples):
    out = [complex(z) for z in (z_samples if z_samples is not None else DEFAULT_SAMPLES) if complex(z) != 0]
    if not out:
        raise DomainError("z = 0 is excluded and no other sample point was given")
    return out


def _record(out, name, lhs, rhs):
    if lhs is None or rhs is None:
        return
    out[name] = max(out.get(name, 0.0), residual(lhs, rhs))


def _conj(a, x, b):
    if x is None:
        return None
    return a @ x @ b


def intertwine_check(seq, k, n_max, z_samples=None, tol=DEFAULT_TOL):
    """Conjugation relations between elementary factors of a sequence and of its transforms.

    Rows are only reported where the data suffice for every ingredient.
    """
    ladder = TransformLadder(seq, tol)
    order = seq.order
    out: Dict[str, float] = {}
    for z in _nonzero_samples(z_samples):
        # conjugation by P~_m and Q~_m
        for m in range(0, min(n_max, k) + 1):
            if 2 * m + 1 > order:
                break
            pp, qq = conjugation_factors(omp_quadruple(seq, m, tol), m, tol)
            pp_inv = inverse(pp, tol, name=f"P~_{m}")
            qz = qq(z)
            qz_inv = inverse(qz, tol, name=f"Q~_{m}(z)")
            j = k - m
            _record(out, "conjugation_length_even", ladder.length(0, k), _conj(pp, ladder.length(2 * m, j), pp_inv))
            _record(out, "conjugation_length_odd", ladder.length(0, k), _conj(qz, ladder.mass(2 * m + 1, j, z), qz_inv))
            _record(out, "conjugation_mass_even", ladder.mass(0, k, z), _conj(pp, ladder.mass(2 * m, j, z), pp_inv))
            _record(out, "conjugation_mass_odd", ladder.mass(0, k + 1, z), _conj(qz, ladder.length(2 * m + 1, j), qz_inv))

        # one-step swaps through Q~_0 of each transform
        for ell in range(0, n_max + 1):
            if ell + 1 > order:
                break
            sw = ladder.swap_factor(ell, z)
            lhs = ladder.length(ell, k)
            rhs = ladder.mass(ell + 1, k, z)
            if lhs is not None and rhs is not None:
                _record(out, "swap_length", lhs @ sw, sw @ rhs)
            lhs = ladder.mass(ell, k + 1, z)
            rhs = ladder.length(ell + 1, k)
            if lhs is not None and rhs is not None:
                _record(out, "swap_mass", lhs @ sw, sw @ rhs)

        # chains of swap factors
        for n in range(0, n_max + 1):
            if 2 * n + 1 <= order:
                ch = ladder.chain(2 * n, z)
                a, b = ladder.length(2 * n + 1, k), ladder.mass(0, k + n + 1, z)
                if a is not None and b is not None:
                    _record(out, "chain_even_length", ch @ a, b @ ch)
                a, b = ladder.mass(2 * n + 1, k, z), ladder.length(0, k + n)
                if a is not None and b is not None:
                    _record(out, "chain_even_mass", ch @ a, b @ ch)
            if 2 * n + 2 <= order:
                ch = ladder.chain(2 * n + 1, z)
                a, b = ladder.length(2 * n + 2, k), ladder.length(0, k + n + 1)
                if a is not None and b is not None:
                    _record(out, "chain_odd_length", ch @ a, b @ ch)
                a, b = ladder.mass(2 * n + 2, k, z), ladder.mass(0, k + n + 1, z)
                if a is not None and b is not None:
                    _record(out, "chain_odd_mass", ch @ a, b @ ch)
    if not out:
        raise LengthError(f"no intertwining relation is available for k={k} at order {order}")
    return out


def transformed_resolvent(seq, m, ell, tol=DEFAULT_TOL):
    """U^[m, ell]: resolvent of the ell-th transform at order m - ell."""
    if not 0 <= ell <= m:
        raise LengthError(f"need 0 <= ell <= m, got ell={ell}, m={m}")
    if m > seq.order:
        raise LengthError(f"U^[{m},{ell}] needs order >= {m}, got {seq.order}")
    return resolvent_direct(_transform(seq, ell, tol), m - ell, tol)


def _transform(seq, ell, tol):
    out = seq
    for _ in range(ell):
        out = transform1(out, tol)
    return out


def splitting_check(seq, m, ell, z_samples=None, tol=DEFAULT_TOL):
    """Factorizations of U_m through the resolvents of the transforms of seq."""
    if not 0 <= ell <= m - 1:
        raise LengthError(f"splitting needs 0 <= ell <= m - 1, got ell={ell}, m={m}")
    if m > seq.order:
        raise LengthError(f"U_{m} needs order >= {m}, got {seq.order}")
    ladder = TransformLadder(seq, tol)
    cache = {}

    def U(top, start):
        if (top, start) not in cache:
            cache[(top, start)] = resolvent_direct(ladder.sequence(start), top - start, tol)
        return cache[(top, start)]

    out: Dict[str, float] = {}
    for z in _nonzero_samples(z_samples):
        u0 = U(m, 0)(z)
        sw0 = ladder.swap_factor(0, z)
        sw0_inv = inverse(sw0, tol, name="Q~_0(z)")
        m0_inv = inverse(ladder.mass(0, 0, z), tol, name="M~_0(z)")
        _record(out, "first_step", U(m, 1)(z), sw0_inv @ m0_inv @ u0 @ sw0)

        sw = ladder.swap_factor(ell, z)
        _record(out, "step_at_ell", U(m, ell)(z), ladder.mass(ell, 0, z) @ sw @ U(m, ell + 1)(z) @ inverse(sw, tol, name="Q~(z)"))

        if m >= 2:
            ch1 = ladder.chain(1, z)
            rhs = ladder.mass(0, 0, z) @ ladder.length(0, 0) @ ch1 @ U(m, 2)(z) @ inverse(ch1, tol, name="chain_1(z)")
            _record(out, "double_step", u0, rhs)

        prod = None
        for j in range(m + 1):
            term = ladder.mass(j, 0, z) @ ladder.swap_factor(j, z)
            prod = term if prod is None else prod @ term
        _record(out, "chain_product", u0 @ ladder.chain(m, z), prod)

        ch = ladder.chain(ell, z)
        rhs = U(ell, 0)(z) @ ch @ U(m, ell + 1)(z) @ inverse(ch, tol, name=f"chain_{ell}(z)")
        _record(out, "splitting", u0, rhs)
    return out


def three_way_check(seq, m, z_samples=None, tol=DEFAULT_TOL):
    """Pairwise residuals of the three constructions of U_m, plus U_m(0) = [[I, L_0 + ... ], [0, I]]."""
    direct = resolvent_direct(seq, m, tol)
    ds = ds_forward(seq.truncate(m), tol)
    chain = elementary_factors(ds, m)
    quad = omp_quadruple(seq.truncate(m), None, tol)
    out = {"direct_vs_factors": 0.0, "direct_vs_polys": 0.0, "factors_vs_polys": 0.0}
    for z in (z_samples if z_samples is not None else DEFAULT_SAMPLES):
        z = complex(z)
        a, b, c = direct(z), factor_product(chain, z), resolvent_from_polys(quad, m, z, tol)
        out["direct_vs_factors"] = max(out["direct_vs_factors"], residual(a, b))
        out["direct_vs_polys"] = max(out["direct_vs_polys"], residual(a, c))
        out["factors_vs_polys"] = max(out["factors_vs_polys"], residual(b, c))
    q = seq.q
    u0 = direct(0.0)
    eye = np.eye(q, dtype=complex)
    out["identity_at_zero"] = max(
        residual(u0[:q, :q], eye), residual(u0[q:, q:], eye), residual(u0[q:, :q], np.zeros((q, q)))
    )
    out["lengths_at_zero"] = residual(u0[:q, q:], sum(ds.lengths, np.zeros((q, q), dtype=complex)))
    return out
