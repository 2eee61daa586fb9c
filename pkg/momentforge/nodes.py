"""
ComfyUI nodes exposing the moment toolkit. Sequences travel between nodes
as JSON strings; a failing node returns {"error": ...} instead of raising.
"""

import json

import numpy as np

from .dsparams import ds_forward
from .errors import MomentForgeError
from .hankel import MomentSequence, classify_by_definition
from .logs import get_logger
from .matkit import DEFAULT_TOL, TolerancePolicy, cmatrix_to_json
from .parametrize import random_spd_sequence, sp_forward
from .resolvent import resolvent_direct, three_way_check
from .schur import transformK
from .suites import SUITES, run_suite

log = get_logger("nodes")

_FAILURES = (MomentForgeError, np.linalg.LinAlgError, json.JSONDecodeError)


def _error(node, err):
    log.warning(f"[{node}] {type(err).__name__}: {err}")
    return json.dumps({"error": f"{type(err).__name__}: {err}"})


def _parse(sequence_json):
    return MomentSequence.from_json(json.loads(sequence_json))


def _policy(tol):
    return DEFAULT_TOL if not tol else TolerancePolicy(rtol_identity=tol)


class MomentSequenceAnalyze:
    """
    Class membership, Stieltjes parametrization and DS parameters of a
    moment sequence.
    """

    @classmethod
    def INPUT_TYPES(cls):
        return {
            "required": {
                "sequence_json": ("STRING", {
                    "default": "",
                    "multiline": True
                }),
            },
            "optional": {
                "tol": ("FLOAT", {
                    "default": 1e-8,
                    "min": 1e-14,
                    "max": 1e-2,
                    "step": 1e-9
                }),
            }
        }

    RETURN_TYPES = ("STRING", "STRING", "STRING")
    RETURN_NAMES = ("class_json", "params_json", "ds_json")
    FUNCTION = "analyze"
    CATEGORY = "momentforge/analysis"

    def analyze(self, sequence_json, tol=1e-8):
        try:
            policy = _policy(tol)
            seq = _parse(sequence_json)
            cls = classify_by_definition(seq, policy)
            sp = sp_forward(seq, policy)
            ds = ds_forward(seq, policy).to_json() if cls.pos_definite else None
            log.info(f"[MomentSequenceAnalyze] q={seq.q}, m={seq.order}, pos_definite={cls.pos_definite}")
            return (
                json.dumps(cls.to_json()),
                json.dumps(sp.to_json()),
                json.dumps(ds),
            )
        except _FAILURES as e:
            err = _error("MomentSequenceAnalyze", e)
            return (err, err, err)


class MomentSchurTransform:
    """k-fold Schur transform of a moment sequence"""

    @classmethod
    def INPUT_TYPES(cls):
        return {
            "required": {
                "sequence_json": ("STRING", {"default": "", "multiline": True}),
                "k": ("INT", {"default": 1, "min": 0, "max": 64, "step": 1}),
            }
        }

    RETURN_TYPES = ("STRING",)
    RETURN_NAMES = ("sequence_json",)
    FUNCTION = "transform"
    CATEGORY = "momentforge/transforms"

    def transform(self, sequence_json, k):
        try:
            return (json.dumps(transformK(_parse(sequence_json), k).to_json()),)
        except _FAILURES as e:
            return (_error("MomentSchurTransform", e),)


class MomentResolventEvaluate:
    """U_m(z) of the sequence plus the residuals between its three constructions."""

    @classmethod
    def INPUT_TYPES(cls):
        return {
            "required": {
                "sequence_json": ("STRING", {"default": "", "multiline": True}),
                "m": ("INT", {"default": 1, "min": 0, "max": 64, "step": 1}),
                "z_re": ("FLOAT", {"default": -1.0, "min": -1e6, "max": 1e6, "step": 0.01}),
                "z_im": ("FLOAT", {"default": 1.0, "min": -1e6, "max": 1e6, "step": 0.01}),
            }
        }

    RETURN_TYPES = ("STRING", "STRING")
    RETURN_NAMES = ("resolvent_json", "residuals_json")
    FUNCTION = "evaluate"
    CATEGORY = "momentforge/resolvent"

    def evaluate(self, sequence_json, m, z_re, z_im):
        try:
            base = _parse(sequence_json).truncate(m)
            z = complex(z_re, z_im)
            value = resolvent_direct(base, m)(z)
            residuals = three_way_check(base, m, [z])
            return (json.dumps(cmatrix_to_json(value)), json.dumps(residuals))
        except _FAILURES as e:
            err = _error("MomentResolventEvaluate", e)
            return (err, err)


class MomentIdentityVerify:
    """Runs a verification suite and reports every row."""

    @classmethod
    def INPUT_TYPES(cls):
        return {
            "required": {
                "sequence_json": ("STRING", {"default": "", "multiline": True}),
                "suite": (list(SUITES), {"default": "all"}),
            },
            "optional": {
                "tol": ("FLOAT", {"default": 1e-8, "min": 1e-14, "max": 1e-2, "step": 1e-9}),
            }
        }

    RETURN_TYPES = ("STRING", "BOOLEAN")
    RETURN_NAMES = ("report_json", "passed")
    FUNCTION = "verify"
    CATEGORY = "momentforge/verification"
    OUTPUT_NODE = True

    def verify(self, sequence_json, suite, tol=1e-8):
        try:
            rows = run_suite(_parse(sequence_json), suite, _policy(tol))
        except _FAILURES as e:
            return (_error("MomentIdentityVerify", e), False)
        passed = all(row.passed for row in rows)
        log.info(f"[MomentIdentityVerify] suite={suite}: {sum(r.passed for r in rows)}/{len(rows)} rows pass")
        return (json.dumps({"passed": passed, "rows": [row.to_json() for row in rows]}), passed)


class MomentRandomSequence:
    """Deterministic random positive definite sequence"""

    @classmethod
    def INPUT_TYPES(cls):
        return {
            "required": {
                "q": ("INT", {"default": 1, "min": 1, "max": 8, "step": 1}),
                "m": ("INT", {"default": 5, "min": 0, "max": 32, "step": 1}),
                "seed": ("INT", {"default": 0, "min": 0, "max": 0xffffffffffffffff}),
            }
        }

    RETURN_TYPES = ("STRING",)
    RETURN_NAMES = ("sequence_json",)
    FUNCTION = "generate"
    CATEGORY = "momentforge/data"

    def generate(self, q, m, seed):
        try:
            return (json.dumps(random_spd_sequence(q, m, seed).to_json()),)
        except _FAILURES as e:
            return (_error("MomentRandomSequence", e),)


# Node registration
NODE_CLASS_MAPPINGS = {
    "momentforge_analyze": MomentSequenceAnalyze,
    "momentforge_schurtransform": MomentSchurTransform,
    "momentforge_resolvent": MomentResolventEvaluate,
    "momentforge_verify": MomentIdentityVerify,
    "momentforge_randomsequence": MomentRandomSequence,
}

NODE_DISPLAY_NAME_MAPPINGS = {
    "momentforge_analyze": "🔮 MomentForge Analyze Sequence",
    "momentforge_schurtransform": "🔮 MomentForge Schur Transform",
    "momentforge_resolvent": "🔮 MomentForge Resolvent Matrix",
    "momentforge_verify": "🔮 MomentForge Verify Identities",
    "momentforge_randomsequence": "🔮 MomentForge Random Sequence",
}
