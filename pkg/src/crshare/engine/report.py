"""CSV rows of run reports.

One row per provider per run plus a pooled ``ALL`` row, in the column
order of ``COLUMNS``. Floats are written with ``repr`` (shortest exact
round-trip), not-available values as an empty cell, so identical runs
give byte-identical files.

``r_bl_global`` is the pooled blocking rate of the run, repeated on every
row of that run; a provider's own rate is ``n_blocked / n_processed``.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from dataclasses import astuple, dataclass

from ..metrics import MetricsReport

COLUMNS: tuple[str, ...] = (
    "scenario_id",
    "axis_value",
    "replication",
    "seed",
    "provider",
    "r_bl_global",
    "eta_s",
    "eta_s_user_weighted",
    "c_e",
    "n_blocked",
    "n_processed",
    "active_users_mean",
    "traffic_load_offered",
)


@dataclass(frozen=True)
class ReportRow:
    scenario_id: str
    axis_value: str
    replication: int
    seed: int
    provider: str
    r_bl_global: float | None
    eta_s: float | None
    eta_s_user_weighted: float | None
    c_e: float | None
    n_blocked: int
    n_processed: int
    active_users_mean: float
    traffic_load_offered: float


def report_rows(
    report: MetricsReport,
    scenario_id: str,
    seed: int,
    axis_value: str = "",
    replication: int = 0,
) -> list[ReportRow]:
    return [
        ReportRow(
            scenario_id=scenario_id,
            axis_value=axis_value,
            replication=replication,
            seed=seed,
            provider=m.label,
            r_bl_global=report.r_bl,
            eta_s=m.eta_s,
            eta_s_user_weighted=m.eta_s_user_weighted,
            c_e=m.c_e,
            n_blocked=m.n_blocked,
            n_processed=m.n_processed,
            active_users_mean=m.active_users_mean,
            traffic_load_offered=m.traffic_load_offered,
        )
        for m in report.rows()
    ]


def format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([format_cell(v) for v in astuple(row)])
    return buf.getvalue()
