"""
Command line entry point: python -m momentforge <command> ...

Exit codes: 0 all checks pass, 2 a check failed or the library rejected
well-formed input, 3 usage, I/O or parse problems.
"""

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .dsparams import ds_forward
from .errors import MomentForgeError
from .hankel import MomentSequence, classify_by_definition
from .logs import get_logger, set_verbosity
from .matkit import TolerancePolicy, cmatrix_to_json
from .measures import extremal_measure
from .parametrize import random_spd_sequence, sp_forward
from .polyomp import omp_quadruple
from .resolvent import elementary_factors, factor_product, resolvent_direct, resolvent_from_polys, three_way_check
from .schur import transformK
from .suites import SUITES, CheckRow, run_suite

log = get_logger("cli")

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_USAGE = 3


class InputError(Exception):
    """Unreadable or malformed input file"""


@dataclass
class Report:
    command: str
    digest: str
    rows: List[CheckRow] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None
    payload: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def to_json(self):
        return {
            "command": self.command,
            "digest": self.digest,
            "seed": self.seed,
            "passed": self.passed,
            "rows": [row.to_json() for row in self.rows],
            "timings": self.timings,
            "payload": self.payload,
        }


def canonical_json(value):
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def stable_hash(value):
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_sequence(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e
    try:
        return MomentSequence.from_json(data), data
    except MomentForgeError as e:
        raise InputError(f"{path} is not a moment sequence: {e}") from e


def _write_json(value, path):
    text = json.dumps(value, indent=2)
    if path in (None, "-"):
        print(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}") from e


def _policy(args):
    tol = TolerancePolicy.from_env()
    return tol.with_rtol(args.tol) if args.tol is not None else tol


def cmd_gen(args, tol):
    seq = random_spd_sequence(args.q, args.m, args.seed)
    _write_json(seq.to_json(), args.out)
    return Report("gen", stable_hash({"q": args.q, "m": args.m, "seed": args.seed}), seed=args.seed,
                  payload={"out": args.out, "order": seq.order})


def cmd_analyze(args, tol):
    seq, raw = _load_sequence(args.input)
    start = time.perf_counter()
    cls = classify_by_definition(seq, tol)
    sp = sp_forward(seq, tol)
    payload = {"class": cls.to_json(), "params": [cmatrix_to_json(p) for p in sp.params]}
    if cls.pos_definite:
        payload["ds"] = ds_forward(seq, tol).to_json()
    return Report("analyze", stable_hash(raw), timings={"analyze": time.perf_counter() - start}, payload=payload)


def cmd_transform(args, tol):
    seq, raw = _load_sequence(args.input)
    out = transformK(seq, args.k, tol)
    _write_json(out.to_json(), args.out)
    return Report("transform", stable_hash(raw), payload={"k": args.k, "order": out.order, "out": args.out})


def cmd_resolve(args, tol):
    seq, raw = _load_sequence(args.input)
    z = complex(args.z_re, args.z_im)
    start = time.perf_counter()
    base = seq.truncate(args.m)
    direct = resolvent_direct(base, args.m, tol)(z)
    factors = factor_product(elementary_factors(ds_forward(base, tol), args.m), z)
    polys = resolvent_from_polys(omp_quadruple(base, None, tol), args.m, z, tol)
    residuals = three_way_check(base, args.m, [z], tol)
    rows = [CheckRow(name, value, tol.rtol_identity, value <= tol.rtol_identity, "three constructions of U_m")
            for name, value in residuals.items()]
    payload = {
        "m": args.m,
        "z": [z.real, z.imag],
        "direct": cmatrix_to_json(direct),
        "factors": cmatrix_to_json(factors),
        "polynomials": cmatrix_to_json(polys),
    }
    return Report("resolve", stable_hash(raw), rows, {"resolve": time.perf_counter() - start}, payload=payload)


def _trial(q, m, seed, suite, tol):
    seq = random_spd_sequence(q, m, seed)
    timings = {}
    rows = [CheckRow(f"seed={seed}:{row.name}", row.residual, row.tolerance, row.passed, row.source, row.detail)
            for row in run_suite(seq, suite, tol, timings=timings)]
    return rows, timings


def cmd_verify(args, tol):
    start = time.perf_counter()
    if args.random is not None:
        q, m, seed = args.random
        seeds = range(seed, seed + args.trials)
        if args.workers > 1:
            with ThreadPoolExecutor(max_workers=args.workers) as pool:
                chunks = list(pool.map(lambda s: _trial(q, m, s, args.suite, tol), seeds))
        else:
            chunks = [_trial(q, m, s, args.suite, tol) for s in seeds]
        rows = [row for chunk, _ in chunks for row in chunk]
        digest = stable_hash({"random": [q, m, seed], "trials": args.trials, "suite": args.suite})
        report = Report("verify", digest, rows, seed=seed, payload={"trials": args.trials, "suite": args.suite})
        # summed over trials
        for _, timings in chunks:
            for name, elapsed in timings.items():
                report.timings[name] = report.timings.get(name, 0.0) + elapsed
    else:
        if args.input is None:
            raise InputError("verify needs an input file or --random Q M SEED")
        seq, raw = _load_sequence(args.input)
        timings = {}
        rows = run_suite(seq, args.suite, tol, timings=timings)
        report = Report("verify", stable_hash(raw), rows, timings, payload={"suite": args.suite})
    report.timings["verify"] = time.perf_counter() - start
    return report


def cmd_recover(args, tol):
    seq, raw = _load_sequence(args.input)
    m = seq.order if args.m is None else args.m
    mu = extremal_measure(seq, m, args.which, tol)
    return Report("recover", stable_hash(raw), payload={"m": m, "which": args.which, "measure": mu.to_json()})


COMMANDS = {
    "gen": cmd_gen,
    "analyze": cmd_analyze,
    "transform": cmd_transform,
    "resolve": cmd_resolve,
    "verify": cmd_verify,
    "recover": cmd_recover,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the report as JSON")
    common.add_argument("--tol", type=float, default=None, help="Identity tolerance (overrides MOMENTFORGE_TOL)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)")

    parser = _Parser(prog="momentforge", description="Truncated matricial Stieltjes moment problem toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="Write a random positive definite moment sequence")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("analyze", parents=[common], help="Class, parametrization and DS parameters")
    p.add_argument("input")

    p = sub.add_parser("transform", parents=[common], help="k-th Schur transform")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("resolve", parents=[common], help="Resolvent matrix U_m at one point")
    p.add_argument("input")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--z-re", type=float, default=0.0)
    p.add_argument("--z-im", type=float, default=0.0)

    p = sub.add_parser("verify", parents=[common], help="Run identity suites")
    p.add_argument("input", nargs="?")
    p.add_argument("--random", type=int, nargs=3, metavar=("Q", "M", "SEED"))
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--suite", choices=SUITES, default="all")

    p = sub.add_parser("recover", parents=[common], help="Extremal measure of a scalar sequence")
    p.add_argument("input")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--which", choices=("min", "max", "auto"), default="auto")
    return parser


def _print_human(report):
    print(f"[momentforge] {report.command} digest={report.digest[:16]}")
    for row in report.rows:
        status = "PASS" if row.passed else "FAIL"
        print(f"  {status}  {row.name:<48} {row.residual:.3e}  (tol {row.tolerance:.1e})")
    if report.payload:
        print(json.dumps(report.payload, indent=2, default=str))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    set_verbosity(args.verbose)
    try:
        tol = _policy(args)
        report = COMMANDS[args.command](args, tol)
    except InputError as e:
        print(f"[error] {e}", file=sys.stderr)
        return EXIT_USAGE
    except (MomentForgeError, np.linalg.LinAlgError) as e:
        if args.verbose:
            log.exception("command failed")
        print(f"[error] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED
    if args.command in ("gen", "transform") and args.out == "-":
        pass
    elif args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        _print_human(report)
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
