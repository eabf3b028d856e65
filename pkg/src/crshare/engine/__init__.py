"""Discrete-event engine: the run loop, sweeps and CSV reports."""

from .events import Event, EventKind, EventQueue
from .report import COLUMNS, ReportRow, render_csv, report_rows
from .simulator import CallCounters, RunResult, Simulation, run
from .sweep import (
    AXES,
    apply_axis,
    paired_less,
    parse_axis_values,
    summarize,
    sweep,
)

__all__ = [
    "AXES",
    "COLUMNS",
    "CallCounters",
    "Event",
    "EventKind",
    "EventQueue",
    "ReportRow",
    "RunResult",
    "Simulation",
    "apply_axis",
    "paired_less",
    "parse_axis_values",
    "render_csv",
    "report_rows",
    "run",
    "summarize",
    "sweep",
]
