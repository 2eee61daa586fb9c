"""
Schur transforms of moment sequences, built from the reciprocal sequence.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ClassificationError, LengthError
from .hankel import MomentSequence, classify_by_definition
from .matkit import DEFAULT_TOL, moore_penrose, residual
from .parametrize import classify_from_sp, sp_forward


def reciprocal(seq, tol=DEFAULT_TOL):
    """s#_0 = s_0^+, s#_j = -s_0^+ sum_{l<j} s_{j-l} s#_l"""
    s0_pinv = moore_penrose(seq[0], tol)
    out = [s0_pinv]
    for j in range(1, seq.order + 1):
        acc = np.zeros((seq.q, seq.q), dtype=complex)
        for l in range(j):
            acc = acc + seq[j - l] @ out[l]
        out.append(-s0_pinv @ acc)
    return MomentSequence(seq.q, tuple(out))


def transform1(seq, tol=DEFAULT_TOL):
    """First Schur transform s<1>_j = -s_0 s#_{j+1} s_0; one moment shorter."""
    if seq.order < 1:
        raise LengthError("the Schur transform needs at least two moments")
    rec = reciprocal(seq, tol)
    s0 = seq[0]
    return MomentSequence(seq.q, tuple(-s0 @ rec[j + 1] @ s0 for j in range(seq.order)))


def transformK(seq, k, tol=DEFAULT_TOL):
    if k < 0 or k > seq.order:
        raise LengthError(f"cannot take {k} Schur transforms of an order {seq.order} sequence")
    out = seq
    for _ in range(k):
        out = transform1(out, tol)
    return out


def _sp_residual(a, b):
    return max((residual(x, y) for x, y in zip(a.params, b.params)), default=0.0)


def transform_shift_check(seq, k, tol=DEFAULT_TOL):
    """Residual between the parametrization of the k-th transform and the k-shifted parametrization."""
    if not classify_by_definition(seq, tol).pos_definite:
        raise ClassificationError("shift check needs a positive definite sequence")
    if k == 0:
        return 0.0
    return _sp_residual(sp_forward(transformK(seq, k, tol), tol), sp_forward(seq, tol).shifted(k))


def parametrization_swap_check(seq, tol=DEFAULT_TOL):
    """L of the first transform equals Lambda of seq, and Lambda of the transform equals the next L."""
    sp = sp_forward(seq, tol)
    sp1 = sp_forward(transform1(seq, tol), tol)
    worst = 0.0
    for j in range(sp1.order + 1):
        # even j of the transform is L_{j/2}^(1) = Lambda_{j/2}; odd j is Lambda^(1) = L_{(j+1)/2}
        worst = max(worst, residual(sp1[j], sp[j + 1]))
    return worst


def tail_class_check(seq, tol=DEFAULT_TOL):
    """True when dropping s_0 keeps a positive definite sequence positive definite."""
    if not classify_by_definition(seq, tol).pos_definite:
        return True
    return classify_by_definition(seq.shift(), tol).pos_definite


@dataclass(frozen=True)
class ClassReport:
    """Outcome of the class-preservation laws for one transform depth.

    None means the law had no premise to test on this input.
    """

    k: int
    positive_preserved: Optional[bool]
    degenerate_order_shifted: Optional[bool]
    top_degeneracy_preserved: Optional[bool]
    source_degenerate_order: Optional[int] = None
    transform_degenerate_order: Optional[int] = None

    @property
    def passed(self):
        return all(flag is not False for flag in (
            self.positive_preserved, self.degenerate_order_shifted, self.top_degeneracy_preserved))

    def to_json(self):
        return {
            "k": self.k,
            "positive_preserved": self.positive_preserved,
            "degenerate_order_shifted": self.degenerate_order_shifted,
            "top_degeneracy_preserved": self.top_degeneracy_preserved,
            "source_degenerate_order": self.source_degenerate_order,
            "transform_degenerate_order": self.transform_degenerate_order,
            "passed": self.passed,
        }


def class_preservation_check(seq, k, tol=DEFAULT_TOL):
    src = classify_from_sp(sp_forward(seq, tol), tol)
    out = transformK(seq, k, tol)
    dst = classify_from_sp(sp_forward(out, tol), tol)

    positive = dst.pos_definite if src.pos_definite else None
    shifted = None
    top = None
    if src.nonneg_definite and src.degenerate_order is not None:
        shifted = dst.degenerate_order == max(0, src.degenerate_order - k)
        if src.degenerate_order == seq.order:
            top = dst.degenerate_order == out.order
    return ClassReport(
        k=k,
        positive_preserved=positive,
        degenerate_order_shifted=shifted,
        top_degeneracy_preserved=top,
        source_degenerate_order=src.degenerate_order,
        transform_degenerate_order=dst.degenerate_order,
    )
