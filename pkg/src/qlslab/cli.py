"""Command-line entry point.

Exit codes: 0 when every check passes, 1 on any verification failure,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from typing import Optional, Sequence

from .report import SCHEMA_VERSION, VerificationReport
from .reduction_parity_or import VARIANTS
from . import suites


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".15g")
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([_fmt(v) for v in row.values()])
    return buf.getvalue()


def report_to_csv(rep: VerificationReport) -> str:
    return rows_to_csv([c.to_dict() for c in rep.checks])


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _emit_report(rep: VerificationReport, args) -> int:
    text = rep.to_json() if args.format == "json" else report_to_csv(rep)
    _emit(text, args.out)
    if not args.quiet:
        for line in rep.summary_lines()[-1:] + [f"FAIL  {c.id}" for c in rep.failures]:
            print(line, file=sys.stderr)
    return 0 if rep.passed else 1


def _floats(text: str) -> list[float]:
    try:
        return suites.parse_grid(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_verify_parity(args) -> int:
    if not 0.0 < args.delta < 1.0:
        raise UsageError(f"--delta must lie in (0, 1), got {args.delta}")
    eps = _floats(args.eps)
    if not eps or any(not 0.0 < e < 1.0 for e in eps):
        raise UsageError("--eps needs values in (0, 1)")
    inputs = suites.select_inputs(args.n, 1, args.inputs)
    seeds = range(args.seed, args.seed + args.perturbations)
    rep = suites.verify_parity_suite(args.n, args.delta, inputs, eps, seeds, args.tol, args.shots, args.seed)
    return _finish(rep, args)


def cmd_verify_parity_or(args) -> int:
    variants = VARIANTS if args.variant == "both" else (args.variant,)
    inputs = suites.select_inputs(args.n, args.m, args.inputs)
    rep = suites.verify_parity_or_suite(args.n, args.m, inputs, variants, args.tol)
    return _finish(rep, args)


def cmd_oracle_check(args) -> int:
    if args.bit_width < 4 or args.bit_width % 2:
        raise UsageError("--bit-width must be an even number >= 4")
    inputs = suites.select_inputs(args.n, args.m, args.inputs)
    rep = suites.oracle_check_suite(args.n, args.m, inputs, args.bit_width)
    return _finish(rep, args)


def cmd_signrep(args) -> int:
    if args.dmax is not None and args.dmax < 0:
        raise UsageError("--dmax must be non-negative")
    if args.dmax is not None and args.n * args.m > 9:
        raise UsageError("degree search is limited to n*m <= 9")
    rep = suites.signrep_suite(args.n, args.m, args.dmax)
    return _finish(rep, args)


def cmd_sweep(args) -> int:
    if args.kind == "margin":
        grid = _floats(args.eps)
        if not grid:
            raise UsageError("empty --eps grid")
        try:
            rows = suites.margin_sweep(grid, args.delta)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        config = {"kind": "margin", "eps": grid, "delta": args.delta if args.delta is not None else "6*eps"}
    else:
        grid = [int(x) for x in _floats(args.n)]
        if not grid or min(grid) < 1:
            raise UsageError("--n grid must be non-empty with positive values")
        if args.kind == "kappa":
            delta = args.delta if args.delta is not None else 0.5
            if not 0.0 < delta < 1.0:
                raise UsageError("--delta must lie in (0, 1)")
            rows = suites.kappa_sweep(grid, args.m, delta, args.samples, args.seed)
            config = {"kind": "kappa", "n": grid, "m": args.m, "delta": delta,
                      "samples": args.samples, "seed": args.seed}
        else:
            m = args.m or 1
            rows = suites.variant_sweep(grid, m)
            config = {"kind": "variant", "n": grid, "m": m}
    if args.format == "csv":
        text = rows_to_csv(rows)
    else:
        text = json.dumps({"schemaVersion": SCHEMA_VERSION, "suite": f"sweep-{args.kind}",
                           "config": config, "rows": rows}, indent=2, ensure_ascii=False) + "\n"
    _emit(text, args.out)
    return 0


def _finish(rep: VerificationReport, args) -> int:
    if args.timing:
        rep.duration_ms = round((time.perf_counter() - args._t0) * 1000.0, 3)
    return _emit_report(rep, args)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol", type=float, default=1e-10, help="state and probability tolerance")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="record durationMs (breaks byte-identical output)")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="qlslab", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-parity", parents=[common], help="PARITY reduction checks")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--inputs", default="all", help="all | padded | explicit bit string")
    p.add_argument("--eps", default="0.01,0.05,0.1", help="perturbation sizes")
    p.add_argument("--perturbations", type=_positive_int, default=100, help="random perturbations per eps")
    p.add_argument("--shots", type=int, default=0, help="also sample the decoder with this many shots")
    p.set_defaults(func=cmd_verify_parity)

    p = sub.add_parser("verify-parity-or", parents=[common], help="PARITY-OR reduction checks")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--inputs", default="all")
    p.add_argument("--variant", choices=VARIANTS + ("both",), default="both")
    p.set_defaults(func=cmd_verify_parity_or)

    p = sub.add_parser("oracle-check", parents=[common], help="sparse-oracle conformance")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--inputs", default="all")
    p.add_argument("--bit-width", type=int, default=64)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("signrep", parents=[common], help="sign-representation checks")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--dmax", type=int, default=None, help="run the LP degree search up to this degree")
    p.set_defaults(func=cmd_signrep)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweeps to CSV or JSON")
    p.add_argument("--kind", choices=("margin", "kappa", "variant"), default="margin")
    p.add_argument("--eps", default="0.01:0.15:0.01")
    p.add_argument("--n", default="1,2,3,4")
    p.add_argument("--m", type=_positive_int, default=None)
    p.add_argument("--delta", type=float, default=None, help="fixed delta instead of 6*eps")
    p.add_argument("--samples", type=_positive_int, default=64)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    if getattr(args, "shots", 0) and args.shots < 0:
        parser.error("--shots must be non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
