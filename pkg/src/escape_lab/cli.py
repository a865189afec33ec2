"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 bad input, 3 a Kneser-Poulsen
violation was found by an exact planar check.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from escape_lab import closedform, kp
from escape_lab.escape import (
    H_DEFAULT,
    T_CAP_DEFAULT,
    mean_escape_monte_carlo_streams,
    mean_escape_quadrature,
)
from escape_lab.optimize import ChainParams, QuadSettings, minimize
from escape_lab.paths import Line, load_path
from escape_lab.rng import stream

EXIT_OK, EXIT_INTERNAL, EXIT_BAD_INPUT, EXIT_KP_VIOLATION = 0, 1, 2, 3
TARGET_SLACK = 1e-3


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _emit(obj, fmt: str, fp):
    if fmt == "json":
        fp.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(list(obj))
        w.writerow([obj[k] for k in obj])


def cmd_evaluate(args) -> int:
    with open(args.path) as fp:
        path = load_path(fp)
    est = mean_escape_quadrature(path, args.h, args.t_cap)
    summary = {
        "J": est.value,
        "error_bound": est.error_bound,
        "truncated": est.truncated,
        "method": est.method,
        "h": args.h,
        "t_cap": args.t_cap,
        "reference_line": 8.0 / (3.0 * math.pi),
    }
    _emit(summary, args.format, sys.stdout)
    if args.out:
        with open(args.out, "w", newline="") as fp:
            est.write_csv(fp)
    return EXIT_OK


def cmd_table(args) -> int:
    fp, close = _open_out(args.out)
    try:
        cols = ["n", "closed_form", "assembled", "mc", "mc_stderr", "z"]
        w = csv.writer(fp, lineterminator="\n") if args.format == "csv" else None
        if w:
            w.writerow(cols)
        for n in range(1, args.n_max + 1):
            exact = closedform.expected_linear_escape(n)
            assembled = closedform.assemble_expectation(n) if n >= 2 else None
            mc = mean_escape_monte_carlo_streams(Line.axis(n), args.samples, _mix(args.seed, n))
            z = abs(mc.value - exact) / mc.error_bound if mc.error_bound > 0 else 0.0
            row = [n, exact, assembled, mc.value, mc.error_bound, z]
            if w:
                w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
            else:
                fp.write(json.dumps(dict(zip(cols, row)), sort_keys=True) + "\n")
    finally:
        if close:
            fp.close()
    return EXIT_OK


def _mix(seed: int, k: int) -> int:
    # derive a per-dimension seed without colliding stream ids
    return (seed * 1_000_003 + k) % 2**64


def cmd_kp(args) -> int:
    fp, close = _open_out(args.out)
    violation = False
    try:
        for rec in kp.run_campaign(args.size, args.seed, args.generator, args.dim, args.n, args.samples):
            fp.write(kp.record_line(rec) + "\n")
            flags = rec["flags"]
            if rec.get("exact") and not (flags["intersection_ok"] and flags["union_ok"]):
                violation = True
    finally:
        if close:
            fp.close()
    if violation:
        print("Kneser-Poulsen violation found in an exact planar check", file=sys.stderr)
        return EXIT_KP_VIOLATION
    return EXIT_OK


def cmd_optimize(args) -> int:
    settings = QuadSettings(h=args.h, t_cap=args.t_cap)
    target = 8.0 / (3.0 * math.pi) + TARGET_SLACK
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    runs = []
    for i in range(args.seeds):
        init = ChainParams((0.0,) * args.k, args.segment_length) if args.init == "zero" else None
        trace = minimize(
            args.k,
            args.segment_length,
            init=init,
            budget=max(args.budget, 1),
            rng=stream(args.seed, i),
            settings=settings,
        )
        if out_dir:
            with open(out_dir / f"trace_{i:03d}.csv", "w", newline="") as fp:
                trace.write_csv(fp)
        runs.append(
            {
                "run": i,
                "best_value": trace.best_value,
                "best_angles": list(trace.best.angles),
                "evaluations": trace.evaluations,
                "converged": trace.converged,
                "reached_target": trace.best_value <= target,
            }
        )
    summary = {
        "k": args.k,
        "segment_length": args.segment_length,
        "budget": args.budget,
        "h": args.h,
        "target": target,
        "fraction_reaching_target": (sum(r["reached_target"] for r in runs) / len(runs)) if runs else 0.0,
        "runs": runs,
    }
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_mc(args) -> int:
    if args.path:
        with open(args.path) as fp:
            path = load_path(fp)
    else:
        path = Line.axis(args.dim)
    est = mean_escape_monte_carlo_streams(path, args.samples, args.seed, t_cap=args.t_cap)
    summary = {
        "J": est.value,
        "stderr": est.error_bound,
        "truncated": est.truncated,
        "samples": est.samples,
        "dim": path.dim,
        "closed_form_line": closedform.expected_linear_escape(path.dim),
    }
    _emit(summary, args.format, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="escape-lab", description="Expected escape times from unit balls.")
    sub = parser.add_subparsers(dest="command", required=True)

    # parents share Action objects, so per-command defaults are passed in here
    # rather than through set_defaults
    def common(fmt="json"):
        par = argparse.ArgumentParser(add_help=False)
        par.add_argument("--format", choices=("json", "csv"), default=fmt)
        par.add_argument("--out", default=None, help="output file (directory for optimize)")
        return par

    def quad(h=H_DEFAULT):
        par = argparse.ArgumentParser(add_help=False)
        par.add_argument("--h", type=_positive_float, default=h)
        par.add_argument("--t-cap", type=_positive_float, default=T_CAP_DEFAULT)
        return par

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_seed, required=True)

    p = sub.add_parser("evaluate", parents=[common(), quad()], help="quadrature estimate of J for a path spec")
    p.add_argument("path", help="JSON path spec")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("table", parents=[common("csv"), seeded], help="closed form vs Monte Carlo by dimension")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("kp", parents=[common(), seeded], help="Kneser-Poulsen campaign as JSON lines")
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--n", type=int, default=6, help="maximum number of balls per pair")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--generator", choices=kp.GENERATORS + ("mixed",), default="mixed")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_kp)

    p = sub.add_parser("optimize", parents=[common(), seeded, quad(0.001)], help="Nelder-Mead over chain turn angles")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--seeds", type=int, default=20, help="number of independent runs")
    p.add_argument("--segment-length", type=_positive_float, default=0.5)
    p.add_argument("--init", choices=("random", "zero"), default="random")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("mc", parents=[common(), seeded], help="Monte Carlo estimate of J")
    p.add_argument("path", nargs="?", help="JSON path spec (default: straight line)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--t-cap", type=_positive_float, default=T_CAP_DEFAULT)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
