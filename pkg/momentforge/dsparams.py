"""
Dyukarev-Stieltjes parameters: the "lengths" L_k and "masses" M_k of a
positive definite moment sequence, their conversion to and from the
Stieltjes parametrization, and how they move under Schur transforms.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .errors import ConditioningError, DimensionError, LengthError, ScopeError
from .hankel import build_H, build_K, schur_L, schur_Lambda, y_block, z_block
from .matkit import (
    DEFAULT_TOL,
    adjoint,
    as_cmatrix,
    cmatrix_from_json,
    cmatrix_to_json,
    inverse,
    residual,
    solve,
)
from .parametrize import StieltjesParam, sp_forward


@dataclass(frozen=True, eq=False)
class DSParams:
    """Lengths L_0..L_{kL} and masses M_0..M_{kM}.

    For a source sequence of order m: kM = m // 2 and kL = (m - 1) // 2.
    """

    q: int
    lengths: Tuple[np.ndarray, ...]
    masses: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.masses) == 0:
            raise LengthError("DS parameters need at least M_0")
        if len(self.masses) - len(self.lengths) not in (0, 1):
            raise LengthError(f"{len(self.masses)} masses do not fit {len(self.lengths)} lengths")
        for label, mats in (("L", self.lengths), ("M", self.masses)):
            for k, a in enumerate(mats):
                if as_cmatrix(a, name=f"{label}_{k}").shape != (self.q, self.q):
                    raise DimensionError(f"{label}_{k} is not {self.q}x{self.q}")
        object.__setattr__(self, "lengths", tuple(as_cmatrix(a) for a in self.lengths))
        object.__setattr__(self, "masses", tuple(as_cmatrix(a) for a in self.masses))

    @property
    def order(self):
        """Order m of the moment sequence these parameters come from"""
        if len(self.masses) > len(self.lengths):
            return 2 * (len(self.masses) - 1)
        return 2 * len(self.lengths) - 1

    def truncate(self, m):
        if m > self.order:
            raise LengthError(f"DS parameters of order {self.order} cannot give order {m}")
        return DSParams(self.q, self.lengths[: (m - 1) // 2 + 1] if m >= 1 else (), self.masses[: m // 2 + 1])

    def to_json(self):
        return {
            "q": self.q,
            "lengths": [cmatrix_to_json(a) for a in self.lengths],
            "masses": [cmatrix_to_json(a) for a in self.masses],
        }

    @classmethod
    def from_json(cls, data):
        try:
            return cls(
                q=int(data["q"]),
                lengths=tuple(cmatrix_from_json(a) for a in data["lengths"]),
                masses=tuple(cmatrix_from_json(a) for a in data["masses"]),
            )
        except (KeyError, TypeError) as e:
            raise DimensionError(f"malformed DS parameter JSON: {e}") from e


def _v(q, k):
    """[I_q; 0_{kq x q}]"""
    v = np.zeros(((k + 1) * q, q), dtype=complex)
    v[:q, :q] = np.eye(q)
    return v


def ds_forward(seq, tol=DEFAULT_TOL):
    """DS parameters from the block structure of H_k and K_k.

    M_k and L_k are the increments of v* H_k^{-1} v and y* K_k^{-1} y, taken
    through the block inverse: M_k = (v* H_{k-1}^{-1} Y) L_k^{-1} (Z H_{k-1}^{-1} v)
    and L_k = (a* K_{k-1}^{-1} Y' - s_k*) Lambda_k^{-1} (Z' K_{k-1}^{-1} a - s_k).
    """
    m, q = seq.order, seq.q
    masses = [inverse(seq[0], tol, name="s_0")]
    for k in range(1, m // 2 + 1):
        h = build_H(seq, k - 1)
        v = _v(q, k - 1)
        left = adjoint(v) @ solve(h, y_block(seq, k, 2 * k - 1), tol, name=f"H_{k - 1}")
        right = z_block(seq, k, 2 * k - 1) @ solve(h, v, tol, name=f"H_{k - 1}")
        masses.append(left @ inverse(schur_L(seq, k, tol), tol, name=f"L_{k}") @ right)
    lengths = []
    if m >= 1:
        lengths.append(adjoint(seq[0]) @ solve(seq[1], seq[0], tol, name="s_1"))
    for k in range(1, (m - 1) // 2 + 1):
        kk = build_K(seq, k - 1)
        a = y_block(seq, 0, k - 1)
        left = adjoint(a) @ solve(kk, y_block(seq, k + 1, 2 * k), tol, name=f"K_{k - 1}") - adjoint(seq[k])
        right = z_block(seq, k + 1, 2 * k) @ solve(kk, a, tol, name=f"K_{k - 1}") - seq[k]
        lengths.append(left @ inverse(schur_Lambda(seq, k, tol), tol, name=f"Lambda_{k}") @ right)
    return DSParams(q, tuple(lengths), tuple(masses))


def _inv(a, tol, name):
    return inverse(a, tol, name=name)


def ds_from_sp(sp, tol=DEFAULT_TOL):
    """Lengths and masses as congruences of the Q_j by prefix products."""
    m = sp.order
    lengths, masses = [], []
    left = np.eye(sp.q, dtype=complex)  # prod Q_{2j} Q_{2j+1}^{-1}
    right = np.eye(sp.q, dtype=complex)  # prod Q_{2j}^{-1} Q_{2j+1}
    for k in range(m // 2 + 1):
        masses.append(right @ _inv(sp[2 * k], tol, f"Q_{2 * k}") @ adjoint(right))
        if 2 * k + 1 <= m:
            left = left @ sp[2 * k] @ _inv(sp[2 * k + 1], tol, f"Q_{2 * k + 1}")
            lengths.append(left @ sp[2 * k + 1] @ adjoint(left))
            right = right @ _inv(sp[2 * k], tol, f"Q_{2 * k}") @ sp[2 * k + 1]
    return DSParams(sp.q, tuple(lengths), tuple(masses))


def sp_from_ds(ds, tol=DEFAULT_TOL):
    """Inverse of ds_from_sp."""
    params = []
    prod = np.eye(ds.q, dtype=complex)  # prod M_j L_j, j < k
    for k in range(len(ds.masses)):
        prod_inv = _inv(prod, tol, f"prod_{k}")
        params.append(adjoint(prod_inv) @ _inv(ds.masses[k], tol, f"M_{k}") @ prod_inv)
        if k < len(ds.lengths):
            prod = prod @ ds.masses[k] @ ds.lengths[k]
            prod_inv = _inv(prod, tol, f"prod_{k + 1}")
            params.append(adjoint(prod_inv) @ ds.lengths[k] @ prod_inv)
    return StieltjesParam(ds.q, tuple(params))


def scalar_ks_params(seq, tol=DEFAULT_TOL):
    """Scalar lengths l_k and masses m_k from Hankel determinants.

    Returns (lengths, masses) as lists of floats.
    """
    if seq.q != 1:
        raise ScopeError(f"determinant formulas are scalar only, got q={seq.q}")
    order = seq.order
    delta = {-1: 1.0}
    nabla = {-1: 1.0}
    for n in range(order // 2 + 1):
        delta[n] = float(np.real(np.linalg.det(build_H(seq, n))))
    for n in range((order - 1) // 2 + 1):
        nabla[n] = float(np.real(np.linalg.det(build_K(seq, n))))
    for name, table in (("det H", delta), ("det K", nabla)):
        for n, value in table.items():
            if value == 0.0:
                raise ConditioningError(f"{name}_{n} vanishes", name=f"{name}_{n}")
    lengths = [delta[k] ** 2 / (nabla[k] * nabla[k - 1]) for k in range((order - 1) // 2 + 1)]
    masses = [nabla[k - 1] ** 2 / (delta[k] * delta[k - 1]) for k in range(order // 2 + 1)]
    return lengths, masses


def ds_of_transform(ds, s0, tol=DEFAULT_TOL):
    """DS parameters of the first Schur transform, given those of the sequence and s_0."""
    s0 = as_cmatrix(s0, name="s_0")
    if len(ds.masses) < 1:
        raise LengthError("need at least one mass")
    s0_inv = _inv(s0, tol, "s_0")
    lengths = tuple(s0 @ ds.masses[k + 1] @ s0 for k in range(len(ds.masses) - 1))
    masses = tuple(s0_inv @ ds.lengths[k] @ s0_inv for k in range(len(ds.lengths)))
    if not masses:
        raise LengthError("the first transform needs at least one length L_0")
    return DSParams(ds.q, lengths, masses)


def _prefix(sp, start, count, tol, kind):
    """prod_{j<count} of Q_{2j+start} Q_{2j+start+1}^{-1} ("ratio") or Q^{-1}_{2j+start} Q_{2j+start+1} ("inv_ratio")"""
    out = np.eye(sp.q, dtype=complex)
    for j in range(count):
        a, b = sp[2 * j + start], sp[2 * j + start + 1]
        if kind == "ratio":
            out = out @ a @ _inv(b, tol, f"Q_{2 * j + start + 1}")
        else:
            out = out @ _inv(a, tol, f"Q_{2 * j + start}") @ b
    return out


def ds_shift_check(seq, ell, k, descent=1, tol=DEFAULT_TOL):
    """Residuals of the closed forms for the DS parameters of the ell-th transform.

    Rows:
      closed_form_length / closed_form_mass  - L^(ell)_k, M^(ell)_k from Q_{ell+j}
      descent_length / descent_mass          - relation between transforms ell and ell+2*descent
      swap_length / swap_mass                - one step ell -> ell+1
    Descent rows are only present for 1 <= descent <= k.
    """
    from .schur import transformK

    if seq.order < ell + 2 * k + 2:
        raise LengthError(f"ds_shift_check needs order >= {ell + 2 * k + 2}, got {seq.order}")
    sp = sp_forward(seq, tol)
    ds_ell = ds_forward(transformK(seq, ell, tol), tol)
    ds_next = ds_forward(transformK(seq, ell + 1, tol), tol)
    out: Dict[str, float] = {}

    left = _prefix(sp, ell, k + 1, tol, "ratio")
    closed_L = left @ sp[2 * k + ell + 1] @ adjoint(left)
    out["closed_form_length"] = residual(ds_ell.lengths[k], closed_L)
    if k == 0:
        closed_M = _inv(sp[ell], tol, f"Q_{ell}")
    else:
        right = _prefix(sp, ell, k, tol, "inv_ratio")
        closed_M = right @ _inv(sp[2 * k + ell], tol, f"Q_{2 * k + ell}") @ adjoint(right)
    out["closed_form_mass"] = residual(ds_ell.masses[k], closed_M)

    if 1 <= descent <= k:
        ds_far = ds_forward(transformK(seq, ell + 2 * descent, tol), tol)
        b = _prefix(sp, ell, descent, tol, "ratio")
        a = _prefix(sp, ell, descent, tol, "inv_ratio")
        out["descent_length"] = residual(ds_ell.lengths[k], b @ ds_far.lengths[k - descent] @ adjoint(b))
        out["descent_mass"] = residual(ds_ell.masses[k], a @ ds_far.masses[k - descent] @ adjoint(a))

    q_ell = sp[ell]
    q_ell_inv = _inv(q_ell, tol, f"Q_{ell}")
    out["swap_length"] = residual(ds_next.lengths[k], q_ell @ ds_ell.masses[k + 1] @ q_ell)
    out["swap_mass"] = residual(ds_next.masses[k], q_ell_inv @ ds_ell.lengths[k] @ q_ell_inv)
    return out


def product_identity_check(seq, tol=DEFAULT_TOL):
    """Max residual over prefixes n of
    prod Q_{2j}^{-1} Q_{2j+1} = (prod M_j L_j)^{-1} and prod Q_{2j} Q_{2j+1}^{-1} = (prod M_j L_j)*.
    """
    sp = sp_forward(seq, tol)
    ds = ds_forward(seq, tol)
    worst: List[float] = [0.0]
    prod = np.eye(seq.q, dtype=complex)
    for n in range(1, len(ds.lengths) + 1):
        prod = prod @ ds.masses[n - 1] @ ds.lengths[n - 1]
        worst.append(residual(_prefix(sp, 0, n, tol, "inv_ratio"), _inv(prod, tol, f"prod_{n}")))
        worst.append(residual(_prefix(sp, 0, n, tol, "ratio"), adjoint(prod)))
    return max(worst)
