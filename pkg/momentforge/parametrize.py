"""
Stieltjes parametrization of a moment sequence by the interleaved Schur
complements Q_{2k} = L_k, Q_{2k+1} = Lambda_k.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ClassificationError, DimensionError, LengthError, StructureError
from .hankel import MomentSequence, SequenceClass, build_H, build_K, schur_L, schur_Lambda, y_block, z_block
from .logs import get_logger
from .matkit import (
    DEFAULT_TOL,
    adjoint,
    as_cmatrix,
    cmatrix_from_json,
    cmatrix_to_json,
    is_nonneg_definite,
    is_pos_definite,
    kernel_projector,
    moore_penrose,
    norm2,
)

log = get_logger("parametrize")


@dataclass(frozen=True, eq=False)
class StieltjesParam:
    q: int
    params: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.params) == 0:
            raise LengthError("a parametrization needs at least Q_0")
        checked = []
        for j, p in enumerate(self.params):
            p = as_cmatrix(p, name=f"Q_{j}")
            if p.shape != (self.q, self.q):
                raise DimensionError(f"Q_{j} has shape {p.shape}, expected ({self.q}, {self.q})")
            p.setflags(write=False)
            checked.append(p)
        object.__setattr__(self, "params", tuple(checked))

    @classmethod
    def scalar(cls, values):
        return cls(q=1, params=tuple(np.array([[v]], dtype=complex) for v in values))

    @property
    def order(self):
        return len(self.params) - 1

    def __len__(self):
        return len(self.params)

    def __getitem__(self, j):
        return self.params[j]

    def shifted(self, k):
        """Drop the first k parameters"""
        if k > self.order:
            raise LengthError(f"cannot shift order {self.order} parametrization by {k}")
        return StieltjesParam(self.q, self.params[k:])

    def to_json(self):
        return {"q": self.q, "params": [cmatrix_to_json(p) for p in self.params]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(q=int(data["q"]), params=tuple(cmatrix_from_json(p) for p in data["params"]))
        except (KeyError, TypeError) as e:
            raise DimensionError(f"malformed parametrization JSON: {e}") from e


def sp_forward(seq, tol=DEFAULT_TOL):
    params = []
    for j in range(seq.order + 1):
        if j % 2 == 0:
            params.append(schur_L(seq, j // 2, tol))
        else:
            params.append(schur_Lambda(seq, (j - 1) // 2, tol))
    return StieltjesParam(seq.q, tuple(params))


def _extend(moments, params, q, tol):
    """Continue `moments` so that parameters len(moments).. equal `params`."""
    moments = list(moments)
    for Q in params:
        j = len(moments)
        if j <= 1:
            moments.append(np.array(Q, dtype=complex))
            continue
        partial = MomentSequence(q, tuple(moments))
        if j % 2 == 0:
            n = j // 2
            top = z_block(partial, n, 2 * n - 1) @ moore_penrose(build_H(partial, n - 1), tol) @ y_block(partial, n, 2 * n - 1)
        else:
            n = (j - 1) // 2
            top = z_block(partial, n + 1, 2 * n) @ moore_penrose(build_K(partial, n - 1), tol) @ y_block(partial, n + 1, 2 * n)
        moments.append(np.array(Q, dtype=complex) + top)
    return MomentSequence(q, tuple(moments))


def sp_inverse(sp, tol=DEFAULT_TOL):
    """Rebuild s_0..s_m by solving the Schur-complement equations for the top moment."""
    return _extend([], sp.params, sp.q, tol)


def _zero_threshold(sp, tol):
    reference = max(norm2(p) for p in sp.params)
    return tol.psd_floor * (1.0 + reference)


def _kernel_included(Qa, Qb, floor, tol):
    """N(Qa) subset of N(Qb), i.e. Qb (I - Qa^+ Qa) = 0"""
    leak = Qb @ kernel_projector(Qa, tol, atol=floor)
    return norm2(leak) <= max(floor, tol.rtol_identity * (1.0 + norm2(Qb)))


def classify_from_sp(sp, tol=DEFAULT_TOL):
    """Class membership read off the parametrization (nonnegativity plus kernel inclusion)."""
    m = sp.order
    floor = _zero_threshold(sp, tol)
    scale = floor / tol.psd_floor

    try:
        nonneg_each = all(is_nonneg_definite(p, tol, scale=scale, name=f"Q_{j}") for j, p in enumerate(sp.params))
    except StructureError as e:
        log.debug(f"parameter not Hermitian: {e}")
        return SequenceClass(False, False, False, None)
    inclusions = [_kernel_included(sp[j], sp[j + 1], floor, tol) for j in range(m)]

    nonneg = nonneg_each and all(inclusions[: max(m - 1, 0)])
    extendable = nonneg and all(inclusions)
    pos = extendable and all(is_pos_definite(p, tol, scale=scale) for p in sp.params)

    degenerate_order = None
    if nonneg:
        for j, p in enumerate(sp.params):
            if norm2(p) <= floor:
                degenerate_order = j
                break
    return SequenceClass(nonneg, extendable, pos, degenerate_order)


def zero_extension(seq, upto, tol=DEFAULT_TOL):
    """First upto+1 moments of the sequence whose parametrization continues with zeros."""
    if upto <= seq.order:
        return seq.truncate(upto)
    if not classify_from_sp(sp_forward(seq, tol), tol).nonneg_extendable:
        raise ClassificationError("zero-extension needs a nonnegative definite extendable sequence")
    padding = [np.zeros((seq.q, seq.q), dtype=complex)] * (upto - seq.order)
    return _extend(seq.moments, padding, seq.q, tol)


def random_spd_sequence(q, m, seed, scale=1.0, complex_entries=True):
    """Deterministic random positive definite sequence of order m.

    Each Q_j is scale * U diag(lam) U* with U the unitary factor of a
    Gaussian matrix and lam drawn uniformly from [0.5, 2].
    """
    if q < 1 or m < 0:
        raise DimensionError(f"need q >= 1 and m >= 0, got q={q}, m={m}")
    rng = np.random.default_rng(seed)
    params = []
    for _ in range(m + 1):
        b = rng.standard_normal((q, q))
        if complex_entries:
            b = b + 1j * rng.standard_normal((q, q))
        u, _ = np.linalg.qr(b)
        lam = rng.uniform(0.5, 2.0, size=q)
        g = (u * lam) @ adjoint(u)
        params.append(scale * (g + adjoint(g)) / 2)
    return sp_inverse(StieltjesParam(q, tuple(params)))
