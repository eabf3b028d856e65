"""Command-line interface for crshare.

Sub-commands
------------
* ``crshare info`` prints version and runtime information.
* ``crshare run --scenario FILE [--seed N] [--trace FILE] [--out CSV]``
  runs one scenario. Without ``--out`` the CSV report goes to stdout;
  with it, a per-provider summary is printed instead.
* ``crshare sweep --scenario FILE --axis NAME --values A,B,... [--reps N]
  [--workers N] --out CSV`` runs a replicated sweep, writes the CSV and
  prints mean and 95% half-width per point.

Exit codes
----------
0 success; 1 output could not be written; 2 invalid scenario or
arguments; 3 invariant fault (a simulator bug; the state dump is printed
to stderr as JSON).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as pkg_version
from typing import NoReturn

from .errors import ConfigurationError, InvariantFault

EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_FAULT = 3


def _crshare_version() -> str:
    """Installed distribution version, else ``crshare.__version__``."""
    try:
        return pkg_version("crshare-sim")
    except PackageNotFoundError:
        from crshare import __version__

        return __version__


def _die(message: str, code: int) -> NoReturn:
    print(f"error: {message}", file=sys.stderr)
    sys.exit(code)


def _fmt(value: float | None, digits: int = 4) -> str:
    return "NA" if value is None else f"{value:.{digits}f}"


# ---------------------------------------------------------------------------
# Sub-command handlers
# ---------------------------------------------------------------------------


def _cmd_info(_args: argparse.Namespace) -> None:
    import platform

    import numpy
    import scipy

    print(f"crshare    {_crshare_version()}")
    print(f"python     {platform.python_version()}")
    print(f"numpy      {numpy.__version__}")
    print(f"scipy      {scipy.__version__}")
    print(f"platform   {platform.platform()}")


def _cmd_run(args: argparse.Namespace) -> None:
    from .config import load_scenario
    from .engine.report import render_csv, report_rows
    from .engine.simulator import run
    from .observability import TsvTraceWriter
    from .storage import LocalFileStorage

    scenario = load_scenario(args.scenario, seed=args.seed)
    if args.trace:
        # Streamed as the run goes; kept even when the run faults.
        storage, key = LocalFileStorage.for_file(args.trace)
        with storage.open_text(key) as stream:
            result = run(scenario, tracer=TsvTraceWriter(stream))
    else:
        result = run(scenario)
    csv_text = render_csv(
        report_rows(result.report, scenario.name, scenario.seed)
    )

    if not args.out:
        sys.stdout.write(csv_text)
        return
    storage, key = LocalFileStorage.for_file(args.out)
    storage.write_text(key, csv_text)

    report = result.report
    print(f"scenario  {scenario.name}  seed={scenario.seed}")
    print(
        f"{'provider':<9}{'r_bl':>10}{'+-95%':>10}"
        f"{'eta_s':>10}{'c_e':>12}{'decided':>10}"
    )
    for m in report.rows():
        print(
            f"{m.label:<9}{_fmt(m.r_bl):>10}{_fmt(m.r_bl_half_width):>10}"
            f"{_fmt(m.eta_s):>10}{_fmt(m.c_e, 2):>12}{m.n_processed:>10}"
        )


def _cmd_sweep(args: argparse.Namespace) -> None:
    from .config import load_scenario
    from .engine.report import render_csv
    from .engine.sweep import parse_axis_values, summarize, sweep
    from .storage import LocalFileStorage

    scenario = load_scenario(args.scenario, seed=args.seed)
    values = parse_axis_values(args.axis, args.values)
    rows = sweep(
        scenario, args.axis, values, reps=args.reps, workers=args.workers
    )
    storage, key = LocalFileStorage.for_file(args.out)
    storage.write_text(key, render_csv(rows))

    print(
        f"{args.axis:<14}{'provider':<9}{'r_bl':>10}{'+-95%':>10}"
        f"{'eta_s':>10}{'+-95%':>10}"
    )
    for s in summarize(rows):
        print(
            f"{s.axis_value:<14}{s.provider:<9}"
            f"{_fmt(s.r_bl.mean):>10}{_fmt(s.r_bl.half_width):>10}"
            f"{_fmt(s.eta_s.mean):>10}{_fmt(s.eta_s.half_width):>10}"
        )


# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crshare",
        description=(
            "crshare: spectrum sharing between cellular providers through "
            "a cognitive-radio sensor network."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"crshare {_crshare_version()}"
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging threshold (default: WARNING).",
    )

    subparsers = parser.add_subparsers(dest="command")

    subparsers.add_parser("info", help="Print runtime environment information.")

    run_parser = subparsers.add_parser("run", help="Run one scenario.")
    run_parser.add_argument("--scenario", required=True, metavar="FILE")
    run_parser.add_argument(
        "--seed", type=int, default=None, help="Override the scenario seed."
    )
    run_parser.add_argument(
        "--trace", metavar="FILE", help="Write a TSV message trace to FILE."
    )
    run_parser.add_argument(
        "--out",
        metavar="CSV",
        help="Write the report to CSV instead of stdout.",
    )

    sweep_parser = subparsers.add_parser(
        "sweep", help="Run a replicated parameter sweep."
    )
    sweep_parser.add_argument("--scenario", required=True, metavar="FILE")
    sweep_parser.add_argument(
        "--axis", required=True, help="mean_arrival, correlation or sharing."
    )
    sweep_parser.add_argument(
        "--values",
        required=True,
        metavar="LIST",
        help="Comma-separated axis values, e.g. 0.0,0.9 or on,off.",
    )
    sweep_parser.add_argument("--reps", type=int, default=10)
    sweep_parser.add_argument("--workers", type=int, default=1)
    sweep_parser.add_argument("--seed", type=int, default=None)
    sweep_parser.add_argument("--out", required=True, metavar="CSV")

    return parser


def main(argv: Sequence[str] | None = None) -> None:
    """Entry point for the ``crshare`` command-line tool."""
    from .storage import StorageError

    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    handlers = {"info": _cmd_info, "run": _cmd_run, "sweep": _cmd_sweep}
    handler = handlers.get(args.command)
    if handler is None:
        parser.print_help()
        sys.exit(EXIT_CONFIG)
    try:
        handler(args)
    except ConfigurationError as exc:
        _die(str(exc), EXIT_CONFIG)
    except InvariantFault as exc:
        dump = json.dumps(dict(exc.state), default=str, indent=2)
        print(dump, file=sys.stderr)
        _die(f"invariant fault: {exc}", EXIT_FAULT)
    except StorageError as exc:
        _die(str(exc), EXIT_IO)
