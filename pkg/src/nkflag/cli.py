"""Command-line entry point: verify, example, scan, integrate."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import reports
from .cartan import StepTooLarge
from .su3 import NAMES

log = logging.getLogger("nkflag")


class UsageError(ValueError):
    pass


def parse_generator(text: str) -> np.ndarray:
    """A basis name (h1..m6), "zero", or eight comma-separated coefficients."""
    text = text.strip()
    if text == "zero":
        return np.zeros(8)
    if text in NAMES:
        v = np.zeros(8)
        v[NAMES.index(text)] = 1.0
        return v
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"unknown generator {text!r}") from None
    if len(vals) != 8:
        raise UsageError(f"generator needs 8 coefficients, got {len(vals)}")
    return np.array(vals)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--report", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="nkflag", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    v.add_argument("--suite", choices=reports.SUITES + ("all",), default="all")

    e = sub.add_parser("example", parents=[common], help="report on a homogeneous example")
    e.add_argument("name")

    s = sub.add_parser("scan", parents=[common], help="grid search for closing constant frames")
    s.add_argument("--grid", type=int, default=9, help="points per angle")
    s.add_argument("--l-range", type=float, default=2.0, help="l values run over [-R, R]")
    s.add_argument("--l-step", type=float, default=0.5)
    s.add_argument("--workers", type=int, default=None)

    i = sub.add_parser("integrate", parents=[common], help="integrate g' = g X along a constant generator")
    i.add_argument("--generator", default="h1")
    i.add_argument("--t", type=float, default=2 * np.pi / 3)
    i.add_argument("--steps", type=int, default=16)
    return p


def run(args: argparse.Namespace) -> reports.Report:
    if args.command == "verify":
        return reports.run_suite(args.suite, args.seed)
    if args.command == "example":
        try:
            return reports.example_report(args.name)
        except reports.UnknownExample:
            raise UsageError(f"unknown example {args.name!r}; choose from {', '.join(reports.EXAMPLES)}") from None
    if args.command == "scan":
        from .scan import ScanConfig, _workers, homogeneous_scan

        if args.grid < 2 or args.l_range <= 0 or args.l_step <= 0:
            raise UsageError("grid must be at least 2 and the l range and step positive")
        cfg = ScanConfig(angle_points=args.grid, l_min=-args.l_range, l_max=args.l_range, l_step=args.l_step,
                         workers=args.workers)
        workers = _workers(cfg)
        log.info("scan: %d angle points, %d workers", args.grid ** 3, workers)
        result = homogeneous_scan(cfg)
        for w in result.warnings:
            log.warning(w)
        return reports.scan_report(result, args.seed)
    if args.command == "integrate":
        if args.steps < 10:
            raise UsageError("integrate needs at least 10 steps")
        return reports.integrate_report(parse_generator(args.generator), args.t, args.steps, args.seed)
    raise UsageError(args.command)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        report = run(args)
    except UsageError as exc:
        log.error("%s", exc)
        return 2
    except StepTooLarge as exc:
        log.error("step too large: %s", exc)
        return 1
    text = report.to_json() if args.report == "json" else report.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if report.failed else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
