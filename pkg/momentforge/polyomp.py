"""
Matrix polynomials and the orthogonal matrix polynomials of a Stieltjes
positive definite sequence.

All polynomials are built coefficient by coefficient from block formulas of
the form left @ W_n(z) @ right, where W_n(z) is the adjoint of the
nilpotent-shift resolvent and therefore a polynomial in z.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import ConditioningError, DimensionError, DomainError, LengthError, MomentMismatchError
from .hankel import build_H, build_K, schur_L, schur_Lambda, y_block, z_block
from .logs import get_logger
from .matkit import (
    DEFAULT_TOL,
    adjoint,
    as_cmatrix,
    cmatrix_from_json,
    cmatrix_to_json,
    inverse,
    norm2,
    residual,
    solve,
    solve_right,
)

log = get_logger("polyomp")

DEFAULT_SAMPLES = (1j, -1j, -1.0 + 1j, -1.0 - 1j, -2.0, 0.5 + 2j, -0.5 - 0.75j, 3.0 + 1j)


@dataclass(frozen=True, eq=False)
class MatrixPoly:
    """Matrix polynomial sum_j z^j A_j stored as an array of shape (d+1, rows, cols)."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim != 3 or arr.shape[0] == 0:
            raise DimensionError(f"coefficient array must have shape (d+1, r, c), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("polynomial has non-finite coefficients")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def constant(cls, a):
        return cls(as_cmatrix(a)[None, :, :])

    @classmethod
    def zero(cls, rows, cols=None):
        return cls(np.zeros((1, rows, rows if cols is None else cols), dtype=complex))

    @classmethod
    def from_list(cls, mats):
        return cls(np.stack([as_cmatrix(a) for a in mats]))

    @property
    def rows(self):
        return self.coeffs.shape[1]

    @property
    def cols(self):
        return self.coeffs.shape[2]

    def __len__(self):
        return self.coeffs.shape[0]

    def __call__(self, z):
        out = self.coeffs[-1].copy()
        for a in self.coeffs[-2::-1]:
            out = z * out + a
        return out

    def degree(self, tol=DEFAULT_TOL):
        """Index of the last coefficient that is not negligible; -1 for the zero polynomial."""
        norms = [norm2(a) for a in self.coeffs]
        floor = tol.rtol_identity * (1.0 + max(norms))
        for j in range(len(norms) - 1, -1, -1):
            if norms[j] > floor:
                return j
        return -1

    def leading(self, tol=DEFAULT_TOL):
        d = self.degree(tol)
        return self.coeffs[max(d, 0)]

    def _padded(self, other):
        n = max(len(self), len(other))
        a = np.zeros((n, self.rows, self.cols), dtype=complex)
        b = np.zeros((n, other.rows, other.cols), dtype=complex)
        a[: len(self)] = self.coeffs
        b[: len(other)] = other.coeffs
        return a, b

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("cannot add polynomials of different block shapes")
        a, b = self._padded(other)
        return MatrixPoly(a + b)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MatrixPoly(-self.coeffs)

    def mul_z(self):
        """z * P(z)"""
        return MatrixPoly(np.concatenate([np.zeros_like(self.coeffs[:1]), self.coeffs]))

    def lmul(self, a):
        """A @ P(z) for a constant A"""
        return MatrixPoly(np.einsum("ij,djk->dik", as_cmatrix(a), self.coeffs))

    def rmul(self, a):
        """P(z) @ A for a constant A"""
        return MatrixPoly(np.einsum("dij,jk->dik", self.coeffs, as_cmatrix(a)))

    def block(self, i, j, q):
        """q x q corner (i, j) of a block polynomial"""
        return MatrixPoly(self.coeffs[:, i * q : (i + 1) * q, j * q : (j + 1) * q])

    @staticmethod
    def assemble(grid):
        """Block polynomial from a nested list of MatrixPoly"""
        n = max(len(p) for row in grid for p in row)
        padded = [[np.concatenate([p.coeffs, np.zeros((n - len(p), p.rows, p.cols), dtype=complex)]) for p in row] for row in grid]
        return MatrixPoly(np.stack([np.block([[c[d] for c in row] for row in padded]) for d in range(n)]))

    def to_json(self):
        return {"q": self.rows, "coeffs": [cmatrix_to_json(a) for a in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls.from_list([cmatrix_from_json(a) for a in data["coeffs"]])
        except (KeyError, TypeError) as e:
            raise DimensionError(f"malformed polynomial JSON: {e}") from e


@dataclass(frozen=True, eq=False)
class OmpQuadruple:
    """First and second kind orthogonal polynomials for the H and K families.

    pH[n], qH[n] exist for 2n - 1 <= m; pK[n], qK[n] for 2n <= m.
    """

    pH: List[MatrixPoly] = field(default_factory=list)
    qH: List[MatrixPoly] = field(default_factory=list)
    pK: List[MatrixPoly] = field(default_factory=list)
    qK: List[MatrixPoly] = field(default_factory=list)

    def to_json(self):
        return {name: [p.to_json() for p in getattr(self, name)] for name in ("pH", "qH", "pK", "qK")}


def shift_resolvent(n, q):
    """z -> (I - z T_n)^{-1}: lower block triangular, block (j, k) = z^{j-k} I for j >= k."""

    def resolvent(z):
        out = np.zeros(((n + 1) * q, (n + 1) * q), dtype=complex)
        for j in range(n + 1):
            for k in range(j + 1):
                out[j * q : (j + 1) * q, k * q : (k + 1) * q] = (z ** (j - k)) * np.eye(q)
        return out

    return resolvent


def shift_matrix(n, q):
    """T_n: identity blocks on the block subdiagonal"""
    t = np.zeros(((n + 1) * q, (n + 1) * q), dtype=complex)
    for j in range(1, n + 1):
        t[j * q : (j + 1) * q, (j - 1) * q : j * q] = np.eye(q)
    return t


def _w_form(left, right, n, q):
    """Coefficients of left @ W_n(z) @ right with W_n(z) = [R_n(conj z)]*."""
    lb = [left[:, j * q : (j + 1) * q] for j in range(n + 1)]
    rb = [right[j * q : (j + 1) * q, :] for j in range(n + 1)]
    return MatrixPoly(np.stack([sum(lb[j] @ rb[j + d] for j in range(n + 1 - d)) for d in range(n + 1)]))


def _v(q, n):
    v = np.zeros(((n + 1) * q, q), dtype=complex)
    v[:q] = np.eye(q)
    return v


def _u(seq, n):
    """u_0 = 0, u_n = [0; -y_{0,n-1}]"""
    u = np.zeros(((n + 1) * seq.q, seq.q), dtype=complex)
    if n >= 1:
        u[seq.q :] = -y_block(seq, 0, n - 1)
    return u


def _identity_poly(q):
    return MatrixPoly.constant(np.eye(q))


def alpha_gamma(seq, n, tol=DEFAULT_TOL):
    """(alpha_n, gamma_n), needs 2n <= m"""
    q = seq.q
    if 2 * n > seq.order:
        raise LengthError(f"alpha_{n}, gamma_{n} need order >= {2 * n}")
    h_inv_v = solve(build_H(seq, n), _v(q, n), tol, name=f"H_{n}")
    alpha = _identity_poly(q) - _w_form(adjoint(_u(seq, n)), h_inv_v, n, q).mul_z()
    gamma = -_w_form(adjoint(_v(q, n)), h_inv_v, n, q).mul_z()
    return alpha, gamma


def beta_delta(seq, n, tol=DEFAULT_TOL):
    """(beta_n, delta_n), needs 2n - 1 <= m"""
    q = seq.q
    if n == 0:
        return MatrixPoly.zero(q), _identity_poly(q)
    if 2 * n - 1 > seq.order:
        raise LengthError(f"beta_{n}, delta_{n} need order >= {2 * n - 1}")
    y = y_block(seq, 0, n - 1)
    k_inv_y = solve(build_K(seq, n - 1), y, tol, name=f"K_{n - 1}")
    beta = _w_form(adjoint(y), k_inv_y, n - 1, q)
    delta = _identity_poly(q) - _w_form(adjoint(_v(q, n - 1)), k_inv_y, n - 1, q).mul_z()
    return beta, delta


def abcd_polys(seq, n, tol=DEFAULT_TOL):
    """(alpha_n, beta_n, gamma_n, delta_n)"""
    alpha, gamma = alpha_gamma(seq, n, tol)
    beta, delta = beta_delta(seq, n, tol)
    return alpha, beta, gamma, delta


def _monic_tail(solved, q):
    """[-X; I] for the solved coefficient block X"""
    return np.vstack([-solved, np.eye(q, dtype=complex)])


def _h_family(seq, n, tol):
    q = seq.q
    if n == 0:
        return _identity_poly(q), MatrixPoly.zero(q)
    right = _monic_tail(solve(build_H(seq, n - 1), y_block(seq, n, 2 * n - 1), tol, name=f"H_{n - 1}"), q)
    p = _w_form(adjoint(_v(q, n)), right, n, q)
    qq = _w_form(-adjoint(_u(seq, n)), right, n, q)
    return p, qq


def _k_family(seq, n, tol):
    q = seq.q
    if n == 0:
        return _identity_poly(q), MatrixPoly.constant(seq[0])
    right = _monic_tail(solve(build_K(seq, n - 1), y_block(seq, n + 1, 2 * n), tol, name=f"K_{n - 1}"), q)
    p = _w_form(adjoint(_v(q, n)), right, n, q)
    qq = _w_form(z_block(seq, 0, n), right, n, q)
    return p, qq


def omp_quadruple(seq, upto_n=None, tol=DEFAULT_TOL):
    """Orthogonal polynomials through index upto_n, each family as far as the data allows."""
    m = seq.order
    top_h = (m + 1) // 2
    top_k = m // 2
    if upto_n is None:
        upto_n = top_h
    if upto_n > top_h:
        raise LengthError(f"polynomials of index {upto_n} need order >= {2 * upto_n - 1}, got {m}")
    quad = OmpQuadruple()
    for n in range(upto_n + 1):
        p, qq = _h_family(seq, n, tol)
        quad.pH.append(p)
        quad.qH.append(qq)
    for n in range(min(upto_n, top_k) + 1):
        p, qq = _k_family(seq, n, tol)
        quad.pK.append(p)
        quad.qK.append(qq)
    return quad


def omp_values_at_zero(ds, n, tol=DEFAULT_TOL):
    """p_{H,n}(0) and q_{K,n}(0) from the DS parameters alone."""
    if n > len(ds.lengths) or n >= len(ds.masses):
        raise LengthError(f"values at zero of index {n} need M_0..M_{n} and L_0..L_{n - 1}")
    prod = np.eye(ds.q, dtype=complex)
    for k in range(n):
        prod = prod @ ds.masses[k] @ ds.lengths[k]
    sign = (-1) ** n
    ph0 = sign * inverse(prod, tol, name=f"prod_{n}")
    qk0 = sign * inverse(prod @ ds.masses[n], tol, name=f"prod_{n} M_{n}")
    return ph0, qk0


@dataclass(frozen=True)
class OrthogonalityReport:
    """Largest residuals of a monic orthogonality test."""

    offdiagonal: float
    diagonal: float
    leading: float
    degrees_ok: bool
    gram: Optional[list] = None

    def worst(self):
        return max(self.offdiagonal, self.diagonal, self.leading, 0.0 if self.degrees_ok else np.inf)

    def to_json(self):
        return {
            "offdiagonal": self.offdiagonal,
            "diagonal": self.diagonal,
            "leading": self.leading,
            "degrees_ok": self.degrees_ok,
        }


def _diagonal_targets(seq, count, family, tol):
    if family == "H":
        return [schur_L(seq, n, tol) for n in range(count)]
    return [schur_Lambda(seq, n, tol) for n in range(count)]


def _check_family(family):
    if family not in ("H", "K"):
        raise ValueError(f"family must be 'H' or 'K', got {family!r}")


def _report(polys, gram, targets, tol):
    count = len(polys)
    off = 0.0
    diag = 0.0
    for j in range(count):
        for k in range(count):
            if j == k:
                diag = max(diag, residual(gram[j][j], targets[j]))
            else:
                off = max(off, residual(gram[j][k], np.zeros_like(gram[j][k]), gram[j][j], gram[k][k]))
    leading = max(residual(p.coeffs[-1], np.eye(p.rows)) for p in polys)
    degrees_ok = all(p.degree(tol) == n for n, p in enumerate(polys))
    return OrthogonalityReport(off, diag, leading, degrees_ok, gram)


def _trimmed(polys):
    """Drop structurally zero top coefficients so p_n has exactly n + 1 coefficients."""
    return [MatrixPoly(p.coeffs[: n + 1]) if len(p) > n + 1 else p for n, p in enumerate(polys)]


def monic_orthogonality_check(polys, measure, family, seq, tol=DEFAULT_TOL):
    """Gram table of the polynomials under an atomic measure (family K uses t * sigma)."""
    from .measures import measure_moments, shifted_measure

    _check_family(family)
    polys = _trimmed(polys)
    count = len(polys)
    needed = 2 * (count - 1) + (1 if family == "K" else 0)
    if needed > seq.order:
        raise LengthError(f"{count} polynomials of family {family} need order >= {needed}")
    produced = measure_moments(measure, needed)
    for j in range(needed + 1):
        if residual(produced[j], seq[j]) > tol.rtol_identity:
            raise MomentMismatchError(f"measure moment {j} does not match s_{j}")
    weighting = shifted_measure(measure) if family == "K" else measure

    def integral(a, b):
        return sum(adjoint(a(t)) @ w @ b(t) for t, w in weighting.atoms)

    gram = [[integral(a, b) for b in polys] for a in polys]
    return _report(polys, gram, _diagonal_targets(seq, count, family, tol), tol)


def _coefficient_pairing(seq, family):
    shift = 0 if family == "H" else 1

    def pairing(a, b):
        out = np.zeros((a.cols, b.cols), dtype=complex)
        for i in range(len(a)):
            for j in range(len(b)):
                out = out + adjoint(a.coeffs[i]) @ seq[i + j + shift] @ b.coeffs[j]
        return out

    return pairing


def monic_system_check(polys, seq, family="H", tol=DEFAULT_TOL, diagonal=None):
    """Monic right orthogonal system conditions against H_N (or K_N).

    Y_j* H_N Y_k vanishes for j != k; the diagonal defaults to L_j (resp.
    Lambda_j) of seq.
    """
    _check_family(family)
    polys = _trimmed(polys)
    count = len(polys)
    needed = 2 * (count - 1) + (1 if family == "K" else 0)
    if needed > seq.order:
        raise LengthError(f"{count} polynomials of family {family} need order >= {needed}")
    pairing = _coefficient_pairing(seq, family)
    gram = [[pairing(a, b) for b in polys] for a in polys]
    targets = diagonal if diagonal is not None else _diagonal_targets(seq, count, family, tol)
    return _report(polys, gram, targets, tol)


def gram_schmidt_monic(seq, n, family="H", tol=DEFAULT_TOL):
    """Monic orthogonal polynomials p_0..p_n by block Gram-Schmidt on I, tI, ..., t^n I."""
    _check_family(family)
    needed = 2 * n - 1 + (1 if family == "K" else 0)
    if needed > seq.order:
        raise LengthError(f"Gram-Schmidt to degree {n} needs order >= {needed}")
    q = seq.q
    pairing = _coefficient_pairing(seq, family)
    out: List[MatrixPoly] = []
    grams = []
    for k in range(n + 1):
        monomial = np.zeros((k + 1, q, q), dtype=complex)
        monomial[k] = np.eye(q)
        p = MatrixPoly(monomial)
        for j, prev in enumerate(out):
            coeff = solve(grams[j], pairing(prev, MatrixPoly(monomial)), tol, name=f"Gram_{j}")
            p = p - prev.rmul(coeff)
        out.append(p)
        if k < n:
            grams.append(pairing(p, p))
    return out


def values_at_zero(quad, n):
    """p_{H,n}(0) and q_{K,n}(0) by direct evaluation"""
    return quad.pH[n](0.0), quad.qK[n](0.0)


def _samples(z_samples):
    return [complex(z) for z in (z_samples if z_samples is not None else DEFAULT_SAMPLES)]


def transform_poly_identities(seq, n, z_samples=None, tol=DEFAULT_TOL):
    """Residuals of the identities linking the polynomials of seq and of its first transform."""
    from .schur import transform1

    if n < 1 or 2 * n > seq.order:
        raise LengthError(f"identities of index {n} need 1 <= n and order >= {2 * n}")
    s0 = seq[0]
    s0_inv = inverse(s0, tol, name="s_0")
    quad = omp_quadruple(seq, n, tol)
    quad1 = omp_quadruple(transform1(seq, tol), n, tol)
    pH, qH, pK, qK = quad.pH[n], quad.qH[n], quad.pK[n], quad.qK[n]
    p1, q1 = quad1.pH[n], quad1.qH[n]
    p1K, q1K = quad1.pK[n - 1], quad1.qK[n - 1]

    out: Dict[str, float] = {
        "first_kind_from_second_kind_K": 0.0,
        "second_kind_from_K_family": 0.0,
        "shifted_first_kind_from_second_kind_H": 0.0,
        "shifted_second_kind_from_H_family": 0.0,
        "sum_identity_H": 0.0,
        "sum_identity_K": 0.0,
    }
    used = 0
    for z in _samples(z_samples):
        if z.imag == 0 and z.real >= 0:
            continue
        try:
            rows = {
                "first_kind_from_second_kind_K": residual(p1(z), s0_inv @ qK(z)),
                "second_kind_from_K_family": residual(q1(z), qK(z) - s0 @ pK(z)),
                "shifted_first_kind_from_second_kind_H": residual(p1K(z), s0_inv @ qH(z)),
                "shifted_second_kind_from_H_family": residual(q1K(z), z * qH(z) - s0 @ pH(z)),
            }
            lhs_h = s0 @ solve_right(pH(z), qH(z), tol, "q_H(z)") @ s0 + solve_right(q1K(z), p1K(z), tol, "p_K1(z)")
            rows["sum_identity_H"] = residual(lhs_h, z * s0, lhs_h)
            lhs_k = s0 @ solve_right(pK(z), qK(z), tol, "q_K(z)") @ s0 + solve_right(q1(z), p1(z), tol, "p_H1(z)")
            rows["sum_identity_K"] = residual(lhs_k, s0, lhs_k)
        except ConditioningError as e:
            log.info(f"resampling: z={z} hits a singular evaluation ({e})")
            continue
        used += 1
        for name, value in rows.items():
            out[name] = max(out[name], value)
    if used == 0:
        raise DomainError("every sample point hit a singular evaluation")

    # values at zero
    out["values_at_zero_first_kind"] = residual(p1(0.0), s0_inv @ qK(0.0))
    if 2 * n + 1 <= seq.order and n <= len(quad1.qK) - 1:
        pH_next = omp_quadruple(seq, n + 1, tol).pH[n + 1]
        out["values_at_zero_second_kind"] = residual(quad1.qK[n](0.0), -s0 @ pH_next(0.0))
    return out


def transform_orthogonality_check(seq, n, tol=DEFAULT_TOL):
    """s_0^{-1} q_{K,k} (k <= n) and s_0^{-1} q_{H,k+1} are monic orthogonal systems of the first transform.

    Returns the worst residual of each system, including the diagonal
    values Lambda_k and L_{k+1} of seq.
    """
    from .schur import transform1

    seq1 = transform1(seq, tol)
    s0_inv = inverse(seq[0], tol, name="s_0")
    quad = omp_quadruple(seq, None, tol)
    out = {}

    count_h = min(n, seq1.order // 2, len(quad.qK) - 1) + 1
    polys = [quad.qK[k].lmul(s0_inv) for k in range(count_h)]
    targets = [schur_Lambda(seq, k, tol) for k in range(count_h)]
    out["second_kind_K_under_transform_H"] = monic_system_check(polys, seq1, "H", tol, diagonal=targets).worst()

    count_k = min(n, (seq1.order - 1) // 2, len(quad.qH) - 2) + 1
    if count_k >= 1:
        polys = [quad.qH[k + 1].lmul(s0_inv) for k in range(count_k)]
        targets = [schur_L(seq, k + 1, tol) for k in range(count_k)]
        out["second_kind_H_under_transform_K"] = monic_system_check(polys, seq1, "K", tol, diagonal=targets).worst()
    return out


def ds_conjugation_check(seq, m, k, tol=DEFAULT_TOL):
    """L_k, M_k and M_{k+1} against the DS parameters of the 2m-th and (2m+1)-th transforms,
    conjugated by p_{H,m}(0) and q_{K,m}(0). Needs k >= m."""
    from .dsparams import ds_forward
    from .schur import transformK

    if k < m:
        raise LengthError(f"need k >= m, got k={k}, m={m}")
    if 2 * m + 1 > seq.order:
        raise LengthError(f"needs order >= {2 * m + 1}")
    quad = omp_quadruple(seq, m, tol)
    ph0, qk0 = values_at_zero(quad, m)
    ph0_inv = inverse(ph0, tol, name=f"p_H{m}(0)")
    qk0_inv = inverse(qk0, tol, name=f"q_K{m}(0)")
    ds = ds_forward(seq, tol)
    ds_even = ds_forward(transformK(seq, 2 * m, tol), tol)
    ds_odd = ds_forward(transformK(seq, 2 * m + 1, tol), tol)
    j = k - m
    out = {}
    if k < len(ds.lengths) and j < len(ds_even.lengths):
        out["length_even"] = residual(ds.lengths[k], adjoint(ph0_inv) @ ds_even.lengths[j] @ ph0_inv)
    if k < len(ds.lengths) and j < len(ds_odd.masses):
        out["length_odd"] = residual(ds.lengths[k], qk0 @ ds_odd.masses[j] @ adjoint(qk0))
    if k < len(ds.masses) and j < len(ds_even.masses):
        out["mass_even"] = residual(ds.masses[k], ph0 @ ds_even.masses[j] @ adjoint(ph0))
    if k + 1 < len(ds.masses) and j < len(ds_odd.lengths):
        out["mass_odd"] = residual(ds.masses[k + 1], adjoint(qk0_inv) @ ds_odd.lengths[j] @ qk0_inv)
    if not out:
        raise LengthError(f"no relation of index k={k} is available at order {seq.order}")
    return out
