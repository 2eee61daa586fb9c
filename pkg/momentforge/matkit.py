"""
Dense complex matrix helpers shared by every module.

Matrices are plain 2-D complex numpy arrays. All comparisons go through a
single TolerancePolicy so that "Hermitian", "nonnegative" and "zero" mean
the same thing everywhere.
"""

import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import ConditioningError, DimensionError, DomainError, StructureError, ToleranceError
from .logs import get_logger

log = get_logger("matkit")

COND_WARN = 1e10
COND_SINGULAR = 1.0 / np.finfo(float).eps


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds used for identity, definiteness and rank decisions."""

    rtol_identity: float = 1e-8
    psd_floor: float = 1e-10
    pinv_rcond: float = 1e-12

    def __post_init__(self):
        for field_name in ("rtol_identity", "psd_floor", "pinv_rcond"):
            value = getattr(self, field_name)
            if not (0.0 < value <= 1.0):
                raise ToleranceError(f"{field_name} must lie in (0, 1], got {value}")

    @classmethod
    def from_env(cls, environ=None):
        """Default policy, with rtol_identity taken from MOMENTFORGE_TOL if set"""
        environ = os.environ if environ is None else environ
        raw = environ.get("MOMENTFORGE_TOL")
        if not raw:
            return cls()
        try:
            return cls(rtol_identity=float(raw))
        except ValueError as e:
            raise ToleranceError(f"MOMENTFORGE_TOL is not a valid tolerance: {raw!r}") from e

    def with_rtol(self, rtol):
        return replace(self, rtol_identity=float(rtol))


DEFAULT_TOL = TolerancePolicy()


def as_cmatrix(a, name="matrix"):
    """Validate and convert to a finite 2-D complex array."""
    arr = np.array(a, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def adjoint(a):
    return np.conj(a).T


def norm2(a):
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _require_square(a, name="matrix"):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")


def is_hermitian(a, tol=DEFAULT_TOL):
    a = np.asarray(a, dtype=complex)
    _require_square(a)
    if a.size == 0:
        return True
    scale = 1.0 + float(np.max(np.abs(a)))
    return float(np.max(np.abs(a - adjoint(a)))) <= tol.rtol_identity * scale


def _hermitian_eigs(a, tol, name):
    a = np.asarray(a, dtype=complex)
    _require_square(a, name)
    if not is_hermitian(a, tol):
        raise StructureError(f"{name} is not Hermitian")
    if a.size == 0:
        return np.zeros(0), 0.0
    eigs = scipy.linalg.eigvalsh((a + adjoint(a)) / 2)
    return eigs, float(np.max(np.abs(eigs)))


def is_nonneg_definite(a, tol=DEFAULT_TOL, scale=None, name="matrix"):
    """min eigenvalue >= -psd_floor * max(||A||, scale)"""
    eigs, norm = _hermitian_eigs(a, tol, name)
    if eigs.size == 0:
        return True
    ref = max(norm, scale or 0.0)
    return bool(eigs[0] >= -tol.psd_floor * ref)


def is_pos_definite(a, tol=DEFAULT_TOL, scale=None, name="matrix"):
    """min eigenvalue > psd_floor * max(||A||, scale)"""
    eigs, norm = _hermitian_eigs(a, tol, name)
    if eigs.size == 0:
        return True
    ref = max(norm, scale or 0.0)
    return bool(eigs[0] > tol.psd_floor * ref)


def moore_penrose(a, tol=DEFAULT_TOL, atol=0.0):
    """Moore-Penrose inverse via SVD, singular values below
    max(atol, pinv_rcond * sigma_max) treated as zero."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    return scipy.linalg.pinv(a, atol=atol, rtol=tol.pinv_rcond)


def penrose_residual(a, g):
    """Largest residual of the four Penrose equations"""
    ag = a @ g
    ga = g @ a
    scale = 1.0 + max(norm2(a), norm2(g))
    rows = (
        norm2(ag @ a - a),
        norm2(ga @ g - g),
        norm2(adjoint(ag) - ag),
        norm2(adjoint(ga) - ga),
    )
    return max(rows) / scale


def condition(a):
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(a))
    return cond if np.isfinite(cond) else np.inf


def _guard(a, name):
    _require_square(a, name)
    cond = condition(a)
    if cond > COND_SINGULAR:
        raise ConditioningError(f"{name} is numerically singular (cond={cond:.1e})", name=name, cond=cond)
    if cond > COND_WARN:
        log.warning(f"{name} is ill-conditioned (cond={cond:.1e})")
    return cond


def inverse(a, tol=DEFAULT_TOL, name="matrix"):
    a = np.asarray(a, dtype=complex)
    _guard(a, name)
    try:
        return scipy.linalg.inv(a)
    except scipy.linalg.LinAlgError as e:
        raise ConditioningError(f"{name} is singular: {e}", name=name) from e


def solve(a, b, tol=DEFAULT_TOL, name="matrix"):
    """A^{-1} B"""
    a = np.asarray(a, dtype=complex)
    _guard(a, name)
    try:
        return scipy.linalg.solve(a, b)
    except scipy.linalg.LinAlgError as e:
        raise ConditioningError(f"{name} is singular: {e}", name=name) from e


def solve_right(b, a, tol=DEFAULT_TOL, name="matrix"):
    """B A^{-1}"""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return solve(a.T, b.T, tol, name).T


def kernel_projector(a, tol=DEFAULT_TOL, atol=0.0):
    """Orthogonal projector onto N(A), i.e. I - A^+ A"""
    a = np.asarray(a, dtype=complex)
    return np.eye(a.shape[1], dtype=complex) - moore_penrose(a, tol, atol) @ a


def residual(lhs, rhs, *operands):
    """||lhs - rhs|| relative to 1 + the largest operand norm"""
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    scale = max([norm2(lhs), norm2(rhs)] + [norm2(np.asarray(x, dtype=complex)) for x in operands])
    return norm2(lhs - rhs) / (1.0 + scale)


def cmatrix_to_json(a):
    a = np.asarray(a, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": np.real(a).tolist(),
        "im": np.imag(a).tolist(),
    }


def cmatrix_from_json(data):
    try:
        rows, cols = int(data["rows"]), int(data["cols"])
        re = np.asarray(data["re"], dtype=float).reshape(-1)
        im = np.asarray(data.get("im", np.zeros(rows * cols)), dtype=float).reshape(-1)
    except (KeyError, TypeError) as e:
        raise DimensionError(f"malformed matrix JSON: {e}") from e
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionError(f"matrix JSON declares {rows}x{cols} but carries {re.size} entries")
    return as_cmatrix((re + 1j * im).reshape(rows, cols))
