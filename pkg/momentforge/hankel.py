"""
Moment sequences, block Hankel matrices and their Schur complements.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, LengthError, StructureError
from .matkit import (
    DEFAULT_TOL,
    as_cmatrix,
    cmatrix_from_json,
    cmatrix_to_json,
    is_hermitian,
    is_nonneg_definite,
    is_pos_definite,
    moore_penrose,
    norm2,
)


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """
    Finite sequence s_0, ..., s_m of complex q x q matrices.

    Non-Hermitian entries are accepted here; operations that need Hermitian
    data check it themselves.
    """

    q: int
    moments: Tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.q < 1:
            raise DimensionError(f"q must be positive, got {self.q}")
        if len(self.moments) == 0:
            raise LengthError("a moment sequence needs at least s_0")
        checked = []
        for j, s in enumerate(self.moments):
            s = as_cmatrix(s, name=f"s_{j}")
            if s.shape != (self.q, self.q):
                raise DimensionError(f"s_{j} has shape {s.shape}, expected ({self.q}, {self.q})")
            s.setflags(write=False)
            checked.append(s)
        object.__setattr__(self, "moments", tuple(checked))

    @classmethod
    def scalar(cls, values):
        """q = 1 sequence from plain numbers"""
        return cls(q=1, moments=tuple(np.array([[v]], dtype=complex) for v in values))

    @property
    def order(self):
        return len(self.moments) - 1

    def __len__(self):
        return len(self.moments)

    def __getitem__(self, j):
        return self.moments[j]

    def shift(self):
        """The sequence u_j = s_{j+1}"""
        if self.order < 1:
            raise LengthError("cannot shift a sequence with a single moment")
        return MomentSequence(self.q, self.moments[1:])

    def truncate(self, m):
        if m < 0 or m > self.order:
            raise LengthError(f"cannot truncate order {self.order} sequence to order {m}")
        return MomentSequence(self.q, self.moments[: m + 1])

    def is_hermitian(self, tol=DEFAULT_TOL):
        return all(is_hermitian(s, tol) for s in self.moments)

    def to_json(self):
        return {"q": self.q, "moments": [cmatrix_to_json(s) for s in self.moments]}

    @classmethod
    def from_json(cls, data):
        try:
            q = int(data["q"])
            moments = tuple(cmatrix_from_json(s) for s in data["moments"])
        except (KeyError, TypeError) as e:
            raise DimensionError(f"malformed moment sequence JSON: {e}") from e
        return cls(q=q, moments=moments)


@dataclass(frozen=True)
class SequenceClass:
    """Class membership of a finite sequence.

    nonneg_definite: Stieltjes nonnegative definite
    nonneg_extendable: Stieltjes nonnegative definite extendable
    pos_definite: Stieltjes positive definite
    degenerate_order: smallest order at which the sequence is completely
    degenerate, None if it never is
    """

    nonneg_definite: bool
    nonneg_extendable: bool
    pos_definite: bool
    degenerate_order: Optional[int] = None

    def __post_init__(self):
        # pos => extendable => nonneg
        object.__setattr__(self, "nonneg_extendable", self.nonneg_extendable and self.nonneg_definite)
        object.__setattr__(self, "pos_definite", self.pos_definite and self.nonneg_extendable)

    def to_json(self):
        return {
            "nonneg_definite": self.nonneg_definite,
            "nonneg_extendable": self.nonneg_extendable,
            "pos_definite": self.pos_definite,
            "degenerate_order": self.degenerate_order,
        }


def _need(seq, top, what):
    if top > seq.order:
        raise LengthError(f"{what} needs moments up to s_{top}, sequence has order {seq.order}")


def build_H(seq, n):
    """H_n = [s_{j+k}]_{j,k=0..n}"""
    if n < 0:
        raise LengthError(f"H_{n} is undefined")
    _need(seq, 2 * n, f"H_{n}")
    return np.block([[seq[j + k] for k in range(n + 1)] for j in range(n + 1)])


def build_K(seq, n):
    """K_n = [s_{j+k+1}]_{j,k=0..n}"""
    if n < 0:
        raise LengthError(f"K_{n} is undefined")
    _need(seq, 2 * n + 1, f"K_{n}")
    return np.block([[seq[j + k + 1] for k in range(n + 1)] for j in range(n + 1)])


def y_block(seq, l, m):
    """Column stack (s_l; ...; s_m)"""
    if not 0 <= l <= m:
        raise LengthError(f"y_{{{l},{m}}} needs 0 <= l <= m")
    _need(seq, m, f"y_{{{l},{m}}}")
    return np.vstack(seq.moments[l : m + 1])


def z_block(seq, l, m):
    """Row stack (s_l, ..., s_m)"""
    if not 0 <= l <= m:
        raise LengthError(f"z_{{{l},{m}}} needs 0 <= l <= m")
    _need(seq, m, f"z_{{{l},{m}}}")
    return np.hstack(seq.moments[l : m + 1])


def schur_L(seq, n, tol=DEFAULT_TOL):
    """L_n = s_{2n} - z_{n,2n-1} H_{n-1}^+ y_{n,2n-1}, L_0 = s_0"""
    _need(seq, 2 * n, f"L_{n}")
    if n == 0:
        return seq[0].copy()
    correction = z_block(seq, n, 2 * n - 1) @ moore_penrose(build_H(seq, n - 1), tol) @ y_block(seq, n, 2 * n - 1)
    return seq[2 * n] - correction


def schur_Lambda(seq, n, tol=DEFAULT_TOL):
    """Lambda_n = s_{2n+1} - z_{n+1,2n} K_{n-1}^+ y_{n+1,2n}, Lambda_0 = s_1"""
    _need(seq, 2 * n + 1, f"Lambda_{n}")
    if n == 0:
        return seq[1].copy()
    correction = z_block(seq, n + 1, 2 * n) @ moore_penrose(build_K(seq, n - 1), tol) @ y_block(seq, n + 1, 2 * n)
    return seq[2 * n + 1] - correction


def top_schur_complement(seq, j, tol=DEFAULT_TOL):
    """L_{j/2} for even j, Lambda_{(j-1)/2} for odd j"""
    if j % 2 == 0:
        return schur_L(seq, j // 2, tol)
    return schur_Lambda(seq, (j - 1) // 2, tol)


def is_negligible(a, reference, tol=DEFAULT_TOL):
    return norm2(a) <= tol.psd_floor * (1.0 + reference)


def classify_by_definition(seq, tol=DEFAULT_TOL):
    """Class membership straight from the definiteness of H_n and K_n."""
    if not seq.is_hermitian(tol):
        raise StructureError("classification needs a Hermitian sequence")
    m = seq.order
    n = m // 2
    if m % 2 == 0:
        blocks = [build_H(seq, n)] + ([build_K(seq, n - 1)] if n >= 1 else [])
    else:
        blocks = [build_H(seq, n), build_K(seq, n)]
    nonneg = all(is_nonneg_definite(b, tol) for b in blocks)
    pos = nonneg and all(is_pos_definite(b, tol) for b in blocks)

    degenerate_order = None
    extendable = False
    if nonneg:
        for j in range(m + 1):
            if is_negligible(top_schur_complement(seq, j, tol), norm2(seq[j]), tol):
                degenerate_order = j
                break
        from .parametrize import classify_from_sp, sp_forward

        extendable = classify_from_sp(sp_forward(seq, tol), tol).nonneg_extendable
    return SequenceClass(
        nonneg_definite=nonneg,
        nonneg_extendable=extendable or pos,
        pos_definite=pos,
        degenerate_order=degenerate_order,
    )
