"""Command line entry point: ``loewner verify | falsify | demo | mean``.

Exit codes: 0 success, 1 verification failure (or unexpected falsification
result), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import maps
from .inequalities import INEQUALITY_IDS
from .io import MatrixFormatError, read_matrix, write_matrix
from .linalg_core import LinalgError, Tolerances
from .means import geometric_mean, harmonic_mean
from .suite import DEFAULT_DIMS, DEFAULT_TRIALS, DEMO_CASES, demo_counterexample, run_suite

_GRADES = {"weak2": maps.Grade.weakly_2_positive, "two": maps.Grade.two_positive}


def _default_seed() -> int:
    raw = os.environ.get("LOEWNER_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"LOEWNER_SEED must be an integer, got {raw!r}")


def _dims(text: str):
    try:
        dims = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}")
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError("dimensions must be positive integers")
    return dims


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loewner", description="Check operator inequalities and positivity counterexamples numerically.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check the inequality suites on seeded random instances")
    v.add_argument("--suite", default="all", choices=("all",) + INEQUALITY_IDS)
    v.add_argument("--seed", type=int, default=None, help="master seed (default: $LOEWNER_SEED or 0)")
    v.add_argument("--trials", type=_count, default=DEFAULT_TRIALS, help="trials per dimension")
    v.add_argument("--dims", type=_dims, default=list(DEFAULT_DIMS))
    v.add_argument("--tol", type=float, default=1e-8, help="relative margin tolerance")
    v.add_argument("--report", type=Path, help="write the JSON report here")

    f = sub.add_parser("falsify", help="search for a block refuting a positivity grade")
    f.add_argument("--map", required=True, dest="map_spec", help="e.g. transpose, det-shift:0.5, pinching:1,2|3,4")
    f.add_argument("--grade", required=True, choices=sorted(_GRADES))
    f.add_argument("--dim", type=int, default=2, help="dimension for maps without an explicit size")
    f.add_argument("--trials", type=_count, default=1000)
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--expect", choices=("auto", "witness", "none"), default="auto",
                   help="auto: expect a witness iff the map's documented grade is below --grade")

    d = sub.add_parser("demo", help="reproduce a counterexample")
    d.add_argument("--case", required=True, choices=DEMO_CASES)
    d.add_argument("--alpha", type=float, default=1.0, help="det-shift parameter")
    d.add_argument("--report", type=Path)

    m = sub.add_parser("mean", help="geometric or harmonic mean of two PSD matrix files")
    m.add_argument("--kind", required=True, choices=("geometric", "harmonic"))
    m.add_argument("A", type=Path)
    m.add_argument("B", type=Path)
    m.add_argument("-o", "--output", type=Path, required=True)
    return p


def _print_block(label, rows):
    print(f"{label}:")
    for row in rows:
        print("  [" + ", ".join(row) + "]")


def _cmd_verify(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    report = run_suite(args.suite, seed, args.trials, args.dims, Tolerances(tol_margin=args.tol))
    text = report.to_json()
    if args.report:
        args.report.write_text(text + "\n")
    summary = report.details.get("per_suite_min_margin", {report.suite_id: report.min_margin})
    for sid, m in summary.items():
        bad = sum(1 for f in report.failures if f.get("suite_id") == sid)
        status = "PASS" if bad == 0 else "FAIL"
        shown = "n/a" if m is None else f"{m:.3e}"
        print(f"{status} {sid:14s} min relative margin {shown} failures {bad}")
    print(f"{len(report.failures)} failure(s) in {report.wall_time:.2f}s")
    return 0 if report.passed else 1


def _cmd_falsify(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    phi = maps.parse_map(args.map_spec, args.dim)
    grade = _GRADES[args.grade]
    found, witness, lam = maps.falsify_grade(phi, grade, args.trials, seed)
    if args.expect == "auto":
        expected = phi.claimed_grade < grade
    else:
        expected = args.expect == "witness"
    print(f"map {phi.kind} grade {grade.name}: {'witness found' if found else 'no witness (inconclusive)'}")
    print(f"least eigenvalue of ampliated block: {lam!r}")
    if witness is not None:
        _print_block("witness block", [[repr(complex(z)) for z in row] for row in witness.assembled])
    return 0 if found == expected else 1


def _cmd_demo(args) -> int:
    report = demo_counterexample(args.case, alpha=args.alpha)
    d = report.details
    _print_block("input block", d["input_block"])
    print(f"input min eigenvalue: {d['input_min_eig']!r}")
    _print_block(f"image under {d['map']}", d["image_block"])
    print("image eigenvalues: " + ", ".join(repr(x) for x in d["image_eigenvalues"]))
    print(f"image min eigenvalue: {d['image_min_eig']!r}")
    print(f"image determinant: {d['image_determinant']!r}")
    if args.report:
        args.report.write_text(report.to_json() + "\n")
    return 0 if report.passed else 1


def _cmd_mean(args) -> int:
    A, B = read_matrix(args.A), read_matrix(args.B)
    M = geometric_mean(A, B) if args.kind == "geometric" else harmonic_mean(A, B)
    write_matrix(args.output, M)
    print(f"wrote {args.kind} mean to {args.output}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"verify": _cmd_verify, "falsify": _cmd_falsify, "demo": _cmd_demo, "mean": _cmd_mean}[args.command]
    try:
        return handler(args)
    except (MatrixFormatError, LinalgError, ValueError, KeyError, OSError) as exc:
        print(f"loewner {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
