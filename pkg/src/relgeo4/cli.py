"""Command-line entry point: ``relgeo4 analyze|parallel|bonnet|roots|verify``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import commands
from .bonnet import CONSTANT_TOL
from .errors import FormatError, RelGeoError
from .report import points_csv, to_json, to_text
from .surface import load_spec, parse_grid

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _grid(text):
    try:
        return parse_grid(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    p = _Parser(prog="relgeo4", description="Relative differential geometry of hypersurfaces in R^4.")
    p.add_argument("command", choices=["analyze", "parallel", "bonnet", "roots", "verify"])
    p.add_argument("spec", nargs="?", help="surface spec file (not used by 'roots')")
    p.add_argument("--mu", type=float, help="relative distance for 'parallel'")
    p.add_argument("--grid", type=_grid, help="sampling grid, e.g. 7x7x7")
    p.add_argument("--tol", type=float, default=CONSTANT_TOL, help="constancy tolerance")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--csv", type=Path, help="write the per-point table to this file")
    p.add_argument("--H", type=float, dest="H")
    p.add_argument("--H2", type=float, dest="H2")
    p.add_argument("--K", type=float, dest="K")
    return p


def _error_report(command, exc):
    d = {"schema": "relgeo4/1", "command": command, "error": type(exc).__name__, "message": str(exc)}
    for attr in ("key", "line", "check"):
        if getattr(exc, attr, None) is not None:
            d[attr] = getattr(exc, attr)
    if getattr(exc, "point", None) is not None:
        d["point"] = [float(v) for v in exc.point]
    return d


def run(args):
    """Execute parsed arguments; returns ``(report, exit_code)``."""
    if args.command == "roots":
        if args.H is None and args.H2 is None and args.K is None:
            raise FormatError("roots needs at least one of --H, --H2, --K")
        report = commands.cmd_roots(args.H, args.H2, args.K)
        return report, EXIT_OK
    if args.spec is None:
        raise FormatError(f"{args.command} needs a spec file")
    spec = load_spec(args.spec, grid=args.grid)
    if args.command == "analyze":
        return commands.cmd_analyze(spec, tol=args.tol), EXIT_OK
    if args.command == "parallel":
        if args.mu is None:
            raise FormatError("parallel needs --mu", "mu")
        if args.mu == 0:
            raise FormatError("--mu must be nonzero", "mu")
        return commands.cmd_parallel(spec, args.mu), EXIT_OK
    if args.command == "bonnet":
        report = commands.cmd_bonnet(spec, tol=args.tol)
        return report, EXIT_FAIL if report["summary"].get("failed") else EXIT_OK
    report = commands.cmd_verify(spec)
    return report, EXIT_OK if report["summary"]["all_passed"] else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report, code = run(args)
    except RelGeoError as exc:
        report, code = _error_report(args.command, exc), EXIT_INPUT
    if args.format == "json":
        sys.stdout.write(to_json(report))
    elif "error" in report:
        sys.stdout.write(f"error: {report['error']}: {report['message']}\n")
    else:
        sys.stdout.write(to_text(report))
    if args.csv is not None and "error" not in report:
        args.csv.write_text(points_csv(report["points"]), encoding="utf-8")
    if "error" in report:
        print(f"relgeo4: {report['error']}: {report['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
