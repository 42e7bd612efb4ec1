"""Command-line front end: ``bddf {eval,table,sample,verify}``.

Exit codes: 0 success, 1 usage or validation error, 2 numerical
non-convergence (rows are still written).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from . import checks, simulate
from .catalog import FamilyDescriptor, ValidationError, make_family
from .inversion import QuadratureConfig, bddf, cdf_of_x

__all__ = ["main", "build_parser", "CommandConfig", "EVAL_COLUMNS", "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "BDDF_OUTPUT_DIR"
EVAL_COLUMNS = ("a", "value", "error_estimate", "evaluations", "converged")

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    family: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    points: list[float] | None = None
    grid: tuple[float, float, float] | None = None
    target: str = "bddf"
    abs_tol: float | None = None
    truncate_at: float | None = None
    max_half_periods: int | None = None
    fmt: str = "csv"
    output: str | None = None

    def quadrature(self) -> QuadratureConfig:
        kw = {}
        if self.abs_tol is not None:
            kw["abs_tol"] = self.abs_tol
        if self.truncate_at is not None:
            kw["hard_truncation"] = self.truncate_at
        if self.max_half_periods is not None:
            kw["max_half_periods"] = self.max_half_periods
        try:
            return QuadratureConfig(**kw)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def abscissae(self) -> list[float]:
        if self.points is not None:
            return self.points
        lo, hi, step = self.grid
        if not step > 0 or hi < lo:
            raise UsageError("need --step > 0 and --to >= --from")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(count)]


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _round9(x: float) -> float:
    return float(_fmt(x))


def _parse_param(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r}: {val!r} is not a number") from None


def _parse_points(text: str) -> list[float]:
    try:
        pts = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed point list {text!r}") from None
    if not pts or not all(math.isfinite(p) for p in pts):
        raise argparse.ArgumentTypeError(f"malformed point list {text!r}")
    return pts


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for non-convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_family(p):
    p.add_argument("--family", required=True, help="family id, e.g. gamma or noncentral-chi-square")
    p.add_argument("-p", "--param", action="append", type=_parse_param, default=[], metavar="KEY=VALUE")


def _add_quadrature(p):
    p.add_argument("--target", choices=("bddf", "cdf"), default="bddf")
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--truncate-at", type=float, metavar="T")
    p.add_argument("--max-half-periods", type=int)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", help=f"output file (relative paths resolve against ${OUTPUT_DIR_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bddf", description="Background driving distribution functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate at a list of points or on a grid")
    _add_family(ev)
    where = ev.add_mutually_exclusive_group(required=True)
    where.add_argument("--points", type=_parse_points, help="comma-separated abscissae")
    where.add_argument("--from", dest="start", type=float)
    ev.add_argument("--to", dest="stop", type=float)
    ev.add_argument("--step", type=float)
    _add_quadrature(ev)

    tb = sub.add_parser("table", help="evaluate on an evenly spaced grid")
    _add_family(tb)
    tb.add_argument("--from", dest="start", type=float, required=True)
    tb.add_argument("--to", dest="stop", type=float, required=True)
    tb.add_argument("--step", type=float, required=True)
    _add_quadrature(tb)

    sm = sub.add_parser("sample", help="draw a reproducible sample batch")
    _add_family(sm)
    sm.add_argument("--method", required=True, help="exact, shot-noise, compound-poisson-bdrv, ...")
    sm.add_argument("-n", type=int, default=1000)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--horizon", type=float)
    sm.add_argument("--n-terms", type=int)
    sm.add_argument("--m-steps", type=int)
    sm.add_argument("-o", "--output")

    vf = sub.add_parser("verify", help="run the built-in verification suites")
    vf.add_argument("--suite", choices=("paper-tables", "identities", "samplers", "all"), default="all")
    vf.add_argument("-n", "--n", dest="n", type=int, default=100_000)
    vf.add_argument("--seed", type=int, default=42)
    return parser


@contextlib.contextmanager
def _open_output(path: str | None, stdout: TextIO):
    if path is None:
        yield stdout
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _family(name: str, params) -> FamilyDescriptor:
    return make_family(name, dict(params))


def _config_from(args) -> CommandConfig:
    grid = None
    if getattr(args, "points", None) is None:
        if args.start is None or args.stop is None or args.step is None:
            raise UsageError("--from, --to and --step must be given together")
        grid = (args.start, args.stop, args.step)
    elif args.command == "eval" and (args.stop is not None or args.step is not None):
        raise UsageError("--points cannot be combined with --to/--step")
    return CommandConfig(
        family=args.family,
        params=dict(args.param),
        points=getattr(args, "points", None),
        grid=grid,
        target=args.target,
        abs_tol=args.abs_tol,
        truncate_at=args.truncate_at,
        max_half_periods=args.max_half_periods,
        fmt=args.fmt,
        output=args.output,
    )


def _write_rows(cfg: CommandConfig, rows, out: TextIO):
    if cfg.fmt == "json":
        payload = {
            "family": cfg.family,
            "params": {k: cfg.params[k] for k in sorted(cfg.params)},
            "target": cfg.target,
            "rows": [
                {
                    "a": _round9(a),
                    "value": _round9(e.value),
                    "error_estimate": _round9(e.error_estimate),
                    "evaluations": e.evaluations,
                    "converged": e.converged,
                }
                for a, e in rows
            ],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    out.write(",".join(EVAL_COLUMNS) + "\n")
    for a, e in rows:
        out.write(f"{_fmt(a)},{_fmt(e.value)},{_fmt(e.error_estimate)},{e.evaluations},{str(e.converged).lower()}\n")


def cmd_eval(cfg: CommandConfig, stdout: TextIO) -> int:
    desc = _family(cfg.family, cfg.params)
    quad = cfg.quadrature()
    fn = bddf if cfg.target == "bddf" else cdf_of_x
    rows = [(a, fn(desc, a, quad)) for a in cfg.abscissae()]
    with _open_output(cfg.output, stdout) as out:
        _write_rows(cfg, rows, out)
    return EXIT_OK if all(e.converged for _, e in rows) else EXIT_NONCONVERGED


def cmd_sample(args, stdout: TextIO) -> int:
    desc = _family(args.family, args.param)
    tuning = {}
    for key, attr in (("horizon", "horizon"), ("n_terms", "n_terms"), ("m_steps", "m_steps")):
        val = getattr(args, attr)
        if val is not None:
            tuning[key] = val
    try:
        batch = simulate.sample(desc, args.method, args.n, args.seed, **tuning)
    except TypeError:
        raise UsageError(f"option(s) {sorted(tuning)} do not apply to method {args.method!r}") from None
    with _open_output(args.output, stdout) as out:
        simulate.write_csv(batch, out)
    return EXIT_OK


def cmd_verify(args, stdout: TextIO) -> int:
    total = failed = 0
    for check in checks.run_suite(args.suite, n=args.n, seed=args.seed):
        total += 1
        failed += not check.passed
        stdout.write(check.line() + "\n")
        stdout.flush()
    stdout.write(f"summary: {total - failed}/{total} passed, {failed} failed\n")
    return EXIT_OK if failed == 0 else EXIT_USAGE


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in ("eval", "table"):
            return cmd_eval(_config_from(args), stdout)
        if args.command == "sample":
            return cmd_sample(args, stdout)
        return cmd_verify(args, stdout)
    except (UsageError, ValidationError) as exc:
        print(f"bddf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bddf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
