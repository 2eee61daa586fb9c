"""
Exception types raised by momentforge.

Every error is a ValueError so callers that only know the node-pack
convention (``except ValueError``) keep working.
"""


class MomentForgeError(ValueError):
    """Base class for all library errors"""


class DimensionError(MomentForgeError):
    """Matrix shapes do not fit the operation"""


class StructureError(MomentForgeError):
    """Input lacks required structure (e.g. not Hermitian)"""


class LengthError(MomentForgeError, IndexError):
    """Too few moments or parameters, or an index out of range"""


class ConditioningError(MomentForgeError):
    """A block that must be inverted is numerically singular"""

    def __init__(self, message, name=None, cond=None):
        super().__init__(message)
        self.name = name
        self.cond = cond


class ClassificationError(MomentForgeError):
    """Sequence is outside the class the operation requires"""


class DomainError(MomentForgeError):
    """Evaluation point or entries outside the admissible domain"""


class MomentMismatchError(MomentForgeError):
    """A measure does not reproduce the prescribed moments"""


class ScopeError(MomentForgeError):
    """Operation only implemented for scalar (q = 1) data"""


class RecoveryError(MomentForgeError):
    """Rational function is not the Stieltjes transform of an atomic measure"""


class ToleranceError(MomentForgeError):
    """Invalid tolerance policy"""
