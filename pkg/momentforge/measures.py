"""
Atomic Hermitian measures on [0, inf), their Stieltjes transforms, and the
lower/upper extremal solutions of the truncated problem.

Recovery of an atomic measure from a rational transform is scalar only.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    ClassificationError,
    ConditioningError,
    DimensionError,
    DomainError,
    LengthError,
    RecoveryError,
    ScopeError,
    StructureError,
)
from .hankel import MomentSequence, classify_by_definition
from .logs import get_logger
from .matkit import (
    DEFAULT_TOL,
    adjoint,
    as_cmatrix,
    cmatrix_from_json,
    cmatrix_to_json,
    inverse,
    is_hermitian,
    is_nonneg_definite,
    norm2,
    residual,
    solve_right,
)
from .polyomp import DEFAULT_SAMPLES, MatrixPoly, omp_quadruple
from .parametrize import zero_extension
from .schur import transform1

log = get_logger("measures")

ROOT_TOL = 1e-9
NEGATIVE_AXIS_SAMPLES = (-0.25, -1.0, -3.0, -10.0)


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """sum_i w_i delta_{t_i} with distinct nodes t_i >= 0 and Hermitian w_i >= 0"""

    q: int
    atoms: Tuple[Tuple[float, np.ndarray], ...] = ()

    def __post_init__(self):
        if self.q < 1:
            raise DimensionError(f"q must be positive, got {self.q}")
        checked = []
        for i, (t, w) in enumerate(self.atoms):
            t = float(np.real(t))
            w = as_cmatrix(w, name=f"w_{i}")
            if w.shape != (self.q, self.q):
                raise DimensionError(f"w_{i} has shape {w.shape}, expected ({self.q}, {self.q})")
            if not np.isfinite(t) or t < 0:
                raise DomainError(f"node t_{i} = {t} is not in [0, inf)")
            if not is_nonneg_definite(w, DEFAULT_TOL, name=f"w_{i}"):
                raise ClassificationError(f"weight w_{i} is not nonnegative definite")
            w.setflags(write=False)
            checked.append((t, w))
        checked.sort(key=lambda atom: atom[0])
        for (a, _), (b, _) in zip(checked, checked[1:]):
            if a == b:
                raise StructureError(f"node {a} appears twice")
        object.__setattr__(self, "atoms", tuple(checked))

    @classmethod
    def scalar(cls, nodes, weights):
        return cls(1, tuple((t, np.array([[w]], dtype=complex)) for t, w in zip(nodes, weights)))

    @property
    def nodes(self):
        return [t for t, _ in self.atoms]

    @property
    def weights(self):
        return [w for _, w in self.atoms]

    def __len__(self):
        return len(self.atoms)

    def to_json(self):
        return {"q": self.q, "atoms": [{"t": t, "w": cmatrix_to_json(w)} for t, w in self.atoms]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(int(data["q"]), tuple((float(a["t"]), cmatrix_from_json(a["w"])) for a in data["atoms"]))
        except (KeyError, TypeError) as e:
            raise DimensionError(f"malformed measure JSON: {e}") from e


@dataclass(frozen=True, eq=False)
class RationalMatrixFn:
    """S(z) = N(z) D(z)^{-1}"""

    numerator: MatrixPoly
    denominator: MatrixPoly

    def __post_init__(self):
        if (self.numerator.cols, self.denominator.rows) != (self.denominator.cols, self.denominator.cols):
            raise DimensionError("numerator and denominator do not form a right fraction")

    def __call__(self, z, tol=DEFAULT_TOL):
        try:
            return solve_right(self.numerator(z), self.denominator(z), tol, name=f"D({z})")
        except ConditioningError as e:
            raise DomainError(f"denominator is singular at z = {z}") from e

    def to_json(self):
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}


@dataclass(frozen=True, eq=False)
class ConstantPair:
    """Constant (phi, psi) of full column rank with phi* psi Hermitian and nonneg real part"""

    phi: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        phi, psi = as_cmatrix(self.phi, name="phi"), as_cmatrix(self.psi, name="psi")
        if phi.shape != psi.shape or phi.shape[0] != phi.shape[1]:
            raise DimensionError(f"phi {phi.shape} and psi {psi.shape} must be equal square shapes")
        q = phi.shape[0]
        if np.linalg.matrix_rank(np.vstack([phi, psi])) != q:
            raise ClassificationError(f"[phi; psi] does not have rank {q}")
        cross = adjoint(phi) @ psi
        if not is_hermitian(cross):
            raise ClassificationError("phi* psi is not Hermitian")
        if not is_nonneg_definite(cross + adjoint(cross)):
            raise ClassificationError("phi* psi + psi* phi is not nonnegative definite")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @property
    def q(self):
        return self.phi.shape[0]

    @classmethod
    def lower(cls, q):
        """(I, 0), giving the lower extremal solution"""
        return cls(np.eye(q), np.zeros((q, q)))

    @classmethod
    def upper(cls, q):
        """(0, I), giving the upper extremal solution"""
        return cls(np.zeros((q, q)), np.eye(q))


def measure_moments(mu, upto):
    if upto < 0:
        raise LengthError(f"upto must be >= 0, got {upto}")
    moments = []
    for j in range(upto + 1):
        acc = np.zeros((mu.q, mu.q), dtype=complex)
        for t, w in mu.atoms:
            acc = acc + (t ** j) * w
        moments.append(acc)
    return MomentSequence(mu.q, tuple(moments))


def stieltjes_transform(mu, z):
    """S(z) = sum_i w_i / (t_i - z)"""
    z = complex(z)
    out = np.zeros((mu.q, mu.q), dtype=complex)
    for t, w in mu.atoms:
        gap = t - z
        if abs(gap) <= 1e-14 * (1.0 + abs(t)):
            raise DomainError(f"z = {z} is a node of the measure")
        out = out + w / gap
    return out


def shifted_measure(mu):
    """t * mu; atoms at the origin drop out"""
    return AtomicMeasure(mu.q, tuple((t, t * w) for t, w in mu.atoms if t > 0))


def lft_constant_pair(U, pair, z, tol=DEFAULT_TOL):
    """(A phi + B psi)(C phi + D psi)^{-1} at z"""
    if U.q != pair.q:
        raise DimensionError(f"resolvent has q={U.q}, pair has q={pair.q}")
    u = U(z)
    q = U.q
    a, b, c, d = u[:q, :q], u[:q, q:], u[q:, :q], u[q:, q:]
    try:
        return solve_right(a @ pair.phi + b @ pair.psi, c @ pair.phi + d @ pair.psi, tol, name="C phi + D psi")
    except ConditioningError as e:
        raise DomainError(f"C phi + D psi is singular at z = {z}") from e


def extremal_transforms(quad, m):
    """(S_min, S_max) of order m as right fractions of the orthogonal polynomials."""
    n = m // 2
    h = n if m % 2 == 0 else n + 1
    if n >= len(quad.pK) or h >= len(quad.pH):
        raise LengthError(f"extremal solutions of order {m} need p_K up to {n} and p_H up to {h}")
    s_min = RationalMatrixFn(-quad.qK[n], quad.pK[n].mul_z())
    s_max = RationalMatrixFn(-quad.qH[h], quad.pH[h])
    return s_min, s_max


def continued_fraction_eval(ds, n, z, which, tol=DEFAULT_TOL):
    """Nested matrix continued fraction in the lengths and masses.

    "min" uses M_0..M_n, L_0..L_{n-1} (order 2n); "max" uses M_0..M_{n-1},
    L_0..L_{n-1} (order 2n - 1 or 2n).
    """
    if which not in ("min", "max"):
        raise ValueError(f"which must be 'min' or 'max', got {which!r}")
    z = complex(z)
    q = ds.q
    if which == "max" and n == 0:
        return np.zeros((q, q), dtype=complex)
    top_mass = n if which == "min" else n - 1
    if top_mass >= len(ds.masses) or n - 1 >= len(ds.lengths):
        raise LengthError(f"continued fraction of depth {n} needs M_0..M_{top_mass} and L_0..L_{n - 1}")

    def inv(a, level):
        try:
            return inverse(a, tol, name=f"level {level}")
        except ConditioningError as e:
            raise DomainError(f"continued fraction is singular at level {level}, z = {z}") from e

    if which == "min":
        tail = -z * ds.masses[n]
        start = n - 1
    else:
        tail = -z * ds.masses[n - 1] + inv(ds.lengths[n - 1], n - 1)
        start = n - 2
    for k in range(start, -1, -1):
        tail = -z * ds.masses[k] + inv(ds.lengths[k] + inv(tail, k + 1), k)
    return inv(tail, 0)


def _scalar_coeffs(p):
    c = np.array(p.coeffs[:, 0, 0])
    if not np.any(c):
        return np.zeros(1, dtype=complex)
    return npoly.polytrim(c, tol=1e-14 * float(np.max(np.abs(c))))


def recover_scalar_measure(S, tol=DEFAULT_TOL):
    """Atomic measure whose Stieltjes transform is the scalar fraction S."""
    if S.numerator.rows != 1 or S.denominator.rows != 1:
        raise ScopeError(f"measure recovery is scalar only, got q={S.denominator.rows}")
    num = _scalar_coeffs(S.numerator)
    den = _scalar_coeffs(S.denominator)
    if len(den) == 1:
        if np.any(np.abs(num) > tol.psd_floor * (1.0 + abs(den[0]))):
            raise RecoveryError("a constant denominator with nonzero numerator has no atoms")
        return AtomicMeasure(1, ())
    roots = npoly.polyroots(den)
    dden = npoly.polyder(den)
    atoms = []
    for r in sorted(roots, key=lambda x: x.real):
        if abs(r.imag) > ROOT_TOL * (1.0 + abs(r)) or r.real < -ROOT_TOL:
            raise RecoveryError(f"denominator root {r} is not in [0, inf)")
        t = max(float(r.real), 0.0)
        slope = npoly.polyval(t, dden)
        if abs(slope) <= ROOT_TOL * (1.0 + np.max(np.abs(dden))):
            raise RecoveryError(f"denominator root {t} is not simple")
        w = -npoly.polyval(t, num) / slope
        if abs(w.imag) > ROOT_TOL * (1.0 + abs(w)) or w.real < -ROOT_TOL:
            raise RecoveryError(f"residue {w} at node {t} is not a nonnegative weight")
        atoms.append((t, np.array([[max(w.real, 0.0)]], dtype=complex)))
    log.debug(f"recovered {len(atoms)} atoms")
    return AtomicMeasure(1, tuple(atoms))


def _require_scalar_positive(seq, tol):
    if seq.q != 1:
        raise ScopeError(f"extremal measures are recovered for q = 1 only, got q={seq.q}")
    if not classify_by_definition(seq, tol).pos_definite:
        raise ClassificationError("extremal measures need a positive definite sequence")


def extremal_measure(seq, m, which="auto", tol=DEFAULT_TOL):
    """Recovered lower or upper extremal measure of order m; "auto" picks upper for odd m."""
    if m > seq.order:
        raise LengthError(f"order {m} exceeds the data (order {seq.order})")
    _require_scalar_positive(seq.truncate(m), tol)
    if which == "auto":
        which = "max" if m % 2 else "min"
    if which not in ("min", "max"):
        raise ValueError(f"which must be 'min', 'max' or 'auto', got {which!r}")
    s_min, s_max = extremal_transforms(omp_quadruple(seq.truncate(m), None, tol), m)
    return recover_scalar_measure(s_min if which == "min" else s_max, tol)


def _moment_rows(produced, target, upto):
    return max((residual(produced[j], target[j]) for j in range(upto + 1)), default=0.0)


def extremal_moment_check(seq, m, tol=DEFAULT_TOL):
    """Moments 0..m+4 of the extremal measure against the zero-extension of s_0..s_m."""
    mu = extremal_measure(seq, m, "auto", tol)
    upto = m + 4
    target = zero_extension(seq.truncate(m), upto, tol)
    return {"extremal_moments": _moment_rows(measure_moments(mu, upto), target, upto)}


def _z_samples(z_samples):
    return [complex(z) for z in (z_samples if z_samples is not None else DEFAULT_SAMPLES) if complex(z) != 0]


def extremal_transform_relation_check(seq, n, z_samples=None, tol=DEFAULT_TOL):
    """Extremal solutions of the first transform in terms of those of seq."""
    if n < 1 or seq.order < 2 * n:
        raise LengthError(f"need n >= 1 and order >= {2 * n}, got n={n}, order {seq.order}")

    base = seq.truncate(2 * n)
    s_min, s_max = extremal_transforms(omp_quadruple(base, None, tol), 2 * n)
    quad1 = omp_quadruple(transform1(base, tol), None, tol)
    t_min = extremal_transforms(quad1, 2 * n - 2)[0]
    t_max = extremal_transforms(quad1, 2 * n - 1)[1]
    s0 = seq[0]
    out: Dict[str, float] = {}
    for z in _z_samples(z_samples):
        try:
            rhs_min = -s0 - s0 @ inverse(z * s_max(z, tol), tol, name="z S_max") @ s0
            rhs_max = -s0 - s0 @ inverse(z * s_min(z, tol), tol, name="z S_min") @ s0
            lhs_min, lhs_max = t_min(z, tol), t_max(z, tol)
        except (ConditioningError, DomainError) as e:
            log.info(f"skipping sample z={z}: {e}")
            continue
        out["transform_min_from_max"] = max(out.get("transform_min_from_max", 0.0), residual(lhs_min, rhs_min))
        out["transform_max_from_min"] = max(out.get("transform_max_from_min", 0.0), residual(lhs_max, rhs_max))
    if not out:
        raise DomainError("no sample point gave invertible extremal transforms")
    return out


def random_atomic_measure(q, atoms, seed):
    """Nodes uniform in (0.1, 5), positive definite weights.

    Moments of order m are positive definite once atoms >= m // 2 + 1.
    """
    if q < 1 or atoms < 0:
        raise DimensionError(f"need q >= 1 and atoms >= 0, got q={q}, atoms={atoms}")
    rng = np.random.default_rng(seed)
    nodes = np.sort(rng.uniform(0.1, 5.0, size=atoms))
    out = []
    for t in nodes:
        g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        w = g @ adjoint(g) / q + 0.1 * np.eye(q)
        out.append((float(t), (w + adjoint(w)) / 2))
    return AtomicMeasure(q, tuple(out))


def _psd_violation(a):
    herm = (a + adjoint(a)) / 2
    lowest = float(np.linalg.eigvalsh(herm)[0])
    return max(0.0, -lowest) / (1.0 + norm2(a))


def transform_positivity_check(mu, z_samples=None):
    """Im S(z) >= 0 for Im z > 0, S(x) >= 0 for x < 0, and S(conj z) = S(z)*."""
    upper = [z for z in _z_samples(z_samples) if z.imag > 0]
    out = {"imaginary_part_nonneg": 0.0, "negative_axis_nonneg": 0.0, "conjugate_symmetry": 0.0}
    for z in upper:
        s = stieltjes_transform(mu, z)
        out["imaginary_part_nonneg"] = max(out["imaginary_part_nonneg"], _psd_violation((s - adjoint(s)) / 2j))
        out["conjugate_symmetry"] = max(out["conjugate_symmetry"], residual(stieltjes_transform(mu, z.conjugate()), adjoint(s)))
    for x in NEGATIVE_AXIS_SAMPLES:
        out["negative_axis_nonneg"] = max(out["negative_axis_nonneg"], _psd_violation(stieltjes_transform(mu, x)))
    return out


def inequality_membership_check(seq, m, tol=DEFAULT_TOL):
    """Both extremal measures reproduce s_0..s_{m-1} and have m-th moment at most s_m."""
    out: Dict[str, float] = {}
    for which in ("min", "max"):
        mu = extremal_measure(seq, m, which, tol)
        produced = measure_moments(mu, m)
        out[f"{which}_lower_moments"] = _moment_rows(produced, seq, m - 1)
        gap = float(np.real(seq[m][0, 0] - produced[m][0, 0]))
        out[f"{which}_top_moment_deficit"] = max(0.0, -gap) / (1.0 + abs(float(np.real(seq[m][0, 0]))))
    return out
