"""Command-line front end.

Exit status is 0 whenever the computation finishes (verdicts live in the
report), 1 on bad arguments, unreadable files or dimension mismatches, and 2
when a solver did not converge; partial results are still written in that
case and carry ``"converged": false``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .applications import (
    DEFAULT_MARGIN,
    certify_entanglement_witness,
    certify_positive_map,
    certify_rank_one_avoiding,
    digest,
    json_safe,
    random_subspace_study,
)
from .eigen import ConvergenceWarning, SolverConfig
from .io import boundary_csv, read_basis, read_choi, read_matrix
from .numrange import SearchConfig, bound, boundary
from .oracle import alternating_ascent, sample_mu
from .tensor import symmetrize
from .validation import SubsystemSet, TensorShape, check_shape, is_symmetric

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2

THREADS_ENV = "TENSORANGE_THREADS"


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for non-convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_shape(text: str) -> TensorShape:
    try:
        return TensorShape.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_p_sets(text: str) -> list[SubsystemSet]:
    """``";2;3;2,3"`` -> ``[{}, {2}, {3}, {2,3}]``."""
    sets = []
    for part in text.split(";"):
        part = part.strip()
        try:
            members = [int(tok) for tok in part.split(",")] if part else []
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad subsystem set {part!r}") from exc
        sets.append(SubsystemSet.of(members))
    return sets


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    shape: TensorShape | None
    p_sets: list[SubsystemSet] | None
    method: str
    search: SearchConfig
    seed: int
    out: str | None
    format: str
    threads: int
    margin: float = DEFAULT_MARGIN
    extra: dict = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="report format")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int,
                        help=f"worker cap (default: ${THREADS_ENV} or 1)")
    tol = common.add_argument_group("tolerances")
    tol.add_argument("--angle-tol", type=float, default=1e-12)
    tol.add_argument("--value-tol", type=float, default=1e-9)
    tol.add_argument("--eig-tol", type=float, default=1e-10)
    tol.add_argument("--max-matvecs", type=_positive_int, default=20000)
    tol.add_argument("--eig-method", choices=("auto", "dense", "iterative"), default="auto")
    tol.add_argument("--margin", type=float, default=DEFAULT_MARGIN)

    parser = _Parser(prog="tensorange",
                     description="Certified bounds on quadratic forms over unit product vectors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shaped(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--shape", type=parse_shape, required=True, help="factor dimensions, e.g. 3,3")
        p.add_argument("matrix", help="Matrix Market file")
        return p

    p = shaped("bound", "certified interval for the product-vector minimum and maximum")
    p.add_argument("--method", choices=("auto", "angle", "ternary", "joint"), default="auto")
    p.add_argument("--p-sets", type=parse_p_sets,
                   help='partial-transpose sets for the joint method, e.g. ";2;3;2,3"')

    p = shaped("numrange", "sample the boundary of the numerical range")
    p.add_argument("--angles", type=int, default=360)

    p = sub.add_parser("rank-one", parents=[common], help="certify that a subspace has no rank-one matrix")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--method", choices=("angle", "ternary"), default="angle")
    p.add_argument("basis", help="concatenated Matrix Market array blocks, one per basis matrix")

    p = sub.add_parser("positive-map", parents=[common], help="certify positivity of a linear map")
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--method", choices=("angle", "ternary"), default="angle")
    p.add_argument("choi", help="Choi matrix in Matrix Market format")

    p = shaped("witness", "certify an entanglement witness")
    p.add_argument("--method", choices=("angle", "ternary"), default="angle")

    p = sub.add_parser("study", parents=[common], help="random-subspace detection study")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=1000)

    p = shaped("oracle", "inner estimates by sampling and alternating ascent")
    p.add_argument("--samples", type=_positive_int, default=10000)
    p.add_argument("--starts", type=_positive_int, default=20)
    return parser


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(THREADS_ENV, "").strip()
    if not env:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    return n


def make_config(args: argparse.Namespace) -> RunConfig:
    solver = SolverConfig(method=args.eig_method, tolerance=args.eig_tol,
                          max_iterations=args.max_matvecs, seed=args.seed)
    search = SearchConfig(angle_tol=args.angle_tol, value_tol=args.value_tol, solver=solver)
    inputs = [getattr(args, k) for k in ("matrix", "basis", "choi") if hasattr(args, k)]
    default_format = "csv" if args.command == "numrange" else "json"
    extra = {k: getattr(args, k) for k in ("m", "n", "k", "trials", "angles", "samples", "starts")
             if hasattr(args, k)}
    p_sets = getattr(args, "p_sets", None)
    method = getattr(args, "method", "auto")
    if p_sets is not None and method not in ("auto", "joint"):
        raise UsageError("--p-sets requires --method joint (or auto)")
    return RunConfig(args.command, inputs, getattr(args, "shape", None), p_sets,
                     method, search, args.seed, args.out, args.format or default_format,
                     _threads(args.threads), args.margin, extra)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(v, (int, float)) or v is None for v in obj):
        yield prefix[:-1], ";".join("" if v is None else repr(v) for v in obj)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], "" if obj is None else obj


def _key_value_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(_flatten(report))
    return buf.getvalue()


def _load_shaped(cfg: RunConfig):
    B = read_matrix(cfg.inputs[0])
    check_shape(B, cfg.shape)
    return B


def _run_bound(cfg: RunConfig):
    B = _load_shaped(cfg)
    report = bound(B, cfg.shape, cfg.method, cfg.p_sets, cfg.search)
    out = report.to_dict()
    out["inputs_digest"] = digest(B)
    return out, report.converged


def _run_numrange(cfg: RunConfig):
    B = _load_shaped(cfg)
    notes = []
    if not is_symmetric(B):
        B = symmetrize(B)
        notes.append("input was not symmetric; used (B + B^T)/2 instead")
    result = boundary(B, cfg.shape, cfg.extra["angles"], cfg.search, cfg.threads)
    ok = all(e.converged for e in result.evaluations)
    if cfg.format == "csv":
        return boundary_csv(result.rows()), ok
    out = {
        "shape": list(cfg.shape.factor_dims),
        "angles": len(result.evaluations),
        "rows": [dict(zip(("theta", "support_value", "re", "im"), r)) for r in result.rows()],
        "inner_area": result.inner_area,
        "outer_area": result.outer_area,
        "converged": ok,
        "notes": notes,
    }
    return out, ok


def _bound_converged(report) -> bool:
    return bool(report.details["bound"]["converged"])


def _run_rank_one(cfg: RunConfig):
    basis = read_basis(cfg.inputs[0], cfg.extra["m"], cfg.extra["n"])
    report = certify_rank_one_avoiding(basis, cfg.search, cfg.margin, cfg.method)
    return report.to_dict(), _bound_converged(report)


def _run_positive_map(cfg: RunConfig):
    C, annotated = read_choi(cfg.inputs[0])
    m, n = cfg.extra["m"], cfg.extra["n"]
    if m is None or n is None:
        if annotated is None:
            raise UsageError("pass --m and --n (the file has no '% shape: m,n' line)")
        m = annotated[0] if m is None else m
        n = annotated[1] if n is None else n
    elif annotated is not None and annotated != (m, n):
        raise UsageError(f"--m/--n ({m},{n}) disagree with the file annotation {annotated}")
    report = certify_positive_map(C, m, n, cfg.search, cfg.margin, cfg.method)
    return report.to_dict(), _bound_converged(report)


def _run_witness(cfg: RunConfig):
    B = _load_shaped(cfg)
    report = certify_entanglement_witness(B, cfg.shape, cfg.search, cfg.margin, cfg.method)
    return report.to_dict(), _bound_converged(report)


def _run_study(cfg: RunConfig):
    e = cfg.extra
    result = random_subspace_study(e["m"], e["n"], e["k"], e["trials"], cfg.seed, cfg.search,
                                   cfg.margin, threads=cfg.threads)
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "headline_value", "certified"])
        for i, (v, c) in enumerate(zip(result.values, result.certified)):
            writer.writerow([i, repr(v), int(c)])
        return buf.getvalue(), True
    return result.to_dict(), True


def _run_oracle(cfg: RunConfig):
    B = _load_shaped(cfg)
    if not is_symmetric(B):
        B = symmetrize(B)
    sampled = sample_mu(B, cfg.shape, cfg.extra["samples"], cfg.seed)
    seeds = np.random.SeedSequence(cfg.seed).generate_state(cfg.extra["starts"])
    lo, hi = math.inf, -math.inf
    for s in seeds:
        lo = min(lo, alternating_ascent(B, cfg.shape, direction="min", seed=int(s))[0].value)
        hi = max(hi, alternating_ascent(B, cfg.shape, direction="max", seed=int(s))[0].value)
    out = {
        "shape": list(cfg.shape.factor_dims),
        "samples": sampled.samples,
        "sample_min": sampled.best_min,
        "sample_max": sampled.best_max,
        "ascent_starts": len(seeds),
        "ascent_min": lo,
        "ascent_max": hi,
        "best_min": min(lo, sampled.best_min),
        "best_max": max(hi, sampled.best_max),
        "inputs_digest": digest(B),
    }
    return out, True


_DISPATCH = {
    "bound": _run_bound,
    "numrange": _run_numrange,
    "rank-one": _run_rank_one,
    "positive-map": _run_positive_map,
    "witness": _run_witness,
    "study": _run_study,
    "oracle": _run_oracle,
}


def execute(cfg: RunConfig) -> tuple[str, bool]:
    """Run one command and return the rendered report and the convergence flag."""
    with warnings.catch_warnings():
        # convergence is reported through the report itself
        warnings.simplefilter("ignore", ConvergenceWarning)
        result, ok = _DISPATCH[cfg.command](cfg)
    if isinstance(result, str):
        return result, ok
    if cfg.format == "csv":
        return _key_value_csv(json_safe(result)), ok
    return json.dumps(json_safe(result), indent=2) + "\n", ok


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        text, ok = execute(cfg)
    except (ValueError, OSError) as exc:
        print(f"tensorange: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"tensorange: error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    if not ok:
        print("tensorange: warning: solver did not converge; results are partial", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def main() -> None:
    sys.exit(run())
