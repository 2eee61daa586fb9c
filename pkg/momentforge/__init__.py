"""
momentforge
Truncated matricial Stieltjes moment problem toolkit, with ComfyUI nodes
"""

from .nodes import NODE_CLASS_MAPPINGS as Nodes_MAPPINGS, NODE_DISPLAY_NAME_MAPPINGS as Nodes_DISPLAY

from .dsparams import DSParams, ds_forward, ds_from_sp, ds_of_transform, scalar_ks_params, sp_from_ds
from .errors import (
    ClassificationError,
    ConditioningError,
    DimensionError,
    DomainError,
    LengthError,
    MomentForgeError,
    MomentMismatchError,
    RecoveryError,
    ScopeError,
    StructureError,
    ToleranceError,
)
from .hankel import MomentSequence, SequenceClass, build_H, build_K, classify_by_definition
from .matkit import DEFAULT_TOL, TolerancePolicy
from .measures import (
    AtomicMeasure,
    ConstantPair,
    RationalMatrixFn,
    continued_fraction_eval,
    extremal_measure,
    extremal_transforms,
    lft_constant_pair,
    measure_moments,
    recover_scalar_measure,
    stieltjes_transform,
)
from .parametrize import StieltjesParam, classify_from_sp, random_spd_sequence, sp_forward, sp_inverse, zero_extension
from .polyomp import MatrixPoly, OmpQuadruple, omp_quadruple
from .resolvent import FactorChain, ResolventMatrix, elementary_factors, resolvent_direct, resolvent_from_polys
from .schur import reciprocal, transform1, transformK
from .suites import CheckRow, run_suite

NODE_CLASS_MAPPINGS = {}
NODE_CLASS_MAPPINGS.update(Nodes_MAPPINGS)

NODE_DISPLAY_NAME_MAPPINGS = {}
NODE_DISPLAY_NAME_MAPPINGS.update(Nodes_DISPLAY)

__all__ = [
    "NODE_CLASS_MAPPINGS",
    "NODE_DISPLAY_NAME_MAPPINGS",
    "AtomicMeasure",
    "CheckRow",
    "ClassificationError",
    "ConditioningError",
    "ConstantPair",
    "DEFAULT_TOL",
    "DSParams",
    "DimensionError",
    "DomainError",
    "FactorChain",
    "LengthError",
    "MatrixPoly",
    "MomentForgeError",
    "MomentMismatchError",
    "MomentSequence",
    "OmpQuadruple",
    "RationalMatrixFn",
    "RecoveryError",
    "ResolventMatrix",
    "ScopeError",
    "SequenceClass",
    "StieltjesParam",
    "StructureError",
    "ToleranceError",
    "TolerancePolicy",
    "build_H",
    "build_K",
    "classify_by_definition",
    "classify_from_sp",
    "continued_fraction_eval",
    "ds_forward",
    "ds_from_sp",
    "ds_of_transform",
    "elementary_factors",
    "extremal_measure",
    "extremal_transforms",
    "lft_constant_pair",
    "measure_moments",
    "omp_quadruple",
    "random_spd_sequence",
    "reciprocal",
    "recover_scalar_measure",
    "resolvent_direct",
    "resolvent_from_polys",
    "run_suite",
    "scalar_ks_params",
    "sp_forward",
    "sp_from_ds",
    "sp_inverse",
    "stieltjes_transform",
    "transform1",
    "transformK",
    "zero_extension",
]
__version__ = "2.0.0"
__author__ = "hdelmont"
