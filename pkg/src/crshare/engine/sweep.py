"""Parameter sweeps with replications, and their statistical summary.

Every point of a sweep is run ``reps`` times. Replication ``r`` uses the
same derived seed at every point, so points can be compared pairwise
(common random numbers).
"""

from __future__ import annotations

import logging
import math
import statistics
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal, get_args

from scipy import stats

from ..config import Scenario
from ..errors import ConfigurationError
from ..traffic.streams import derive_seed
from .report import ReportRow, report_rows
from .simulator import run

logger = logging.getLogger(__name__)

Axis = Literal["mean_arrival", "correlation", "sharing"]
AXES: tuple[str, ...] = get_args(Axis)

AxisValue = float | bool

_TRUE = {"on", "true", "1", "yes"}
_FALSE = {"off", "false", "0", "no"}


def parse_axis_values(axis: str, text: str) -> list[AxisValue]:
    """Parse a comma-separated value list for *axis*.

    Raises:
        ConfigurationError: unknown axis, empty list, or a value that does
            not parse for the axis.
    """
    if axis not in AXES:
        raise ConfigurationError(
            f"unknown sweep axis {axis!r}; expected one of {', '.join(AXES)}"
        )
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigurationError("sweep needs at least one axis value")
    values: list[AxisValue] = []
    for item in items:
        if axis == "sharing":
            low = item.lower()
            if low in _TRUE:
                values.append(True)
            elif low in _FALSE:
                values.append(False)
            else:
                raise ConfigurationError(f"invalid sharing value {item!r}")
        else:
            try:
                values.append(float(item))
            except ValueError as exc:
                raise ConfigurationError(
                    f"invalid {axis} value {item!r}"
                ) from exc
    return values


def format_axis_value(value: AxisValue) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    return repr(float(value))


def apply_axis(base: Scenario, axis: str, value: AxisValue) -> Scenario:
    """Derive the scenario of one sweep point.

    ``mean_arrival`` rescales the providers' mean rates so their average
    equals *value* (calls/s) and their relative profile is kept.

    Raises:
        ConfigurationError: the axis is unknown or the derived scenario is
            invalid.
    """
    if axis == "sharing":
        return replace(base, sharing_enabled=bool(value))
    if axis == "correlation":
        if base.traffic.covariance is not None:
            raise ConfigurationError(
                "correlation sweep needs a scenario without an explicit "
                "covariance"
            )
        traffic = replace(base.traffic, correlation=float(value))
        return replace(base, traffic=traffic)
    if axis == "mean_arrival":
        rate = float(value)
        if not rate > 0 or math.isinf(rate):
            raise ConfigurationError(
                "mean_arrival values must be finite and > 0"
            )
        current = base.traffic.resolved_mean_rates(base.topology.n_providers)
        avg = sum(current) / len(current)
        if avg > 0:
            rates = tuple(r * rate / avg for r in current)
        else:
            rates = (rate,) * len(current)
        return replace(base, traffic=replace(base.traffic, mean_rates=rates))
    raise ConfigurationError(f"unknown sweep axis {axis!r}")


@dataclass(frozen=True)
class _Job:
    scenario: Scenario
    scenario_id: str
    axis_value: str
    replication: int


def _run_job(job: _Job) -> list[ReportRow]:
    result = run(job.scenario)
    return report_rows(
        result.report,
        scenario_id=job.scenario_id,
        seed=job.scenario.seed,
        axis_value=job.axis_value,
        replication=job.replication,
    )


def sweep(
    base: Scenario,
    axis: str,
    values: Sequence[AxisValue],
    reps: int = 10,
    workers: int = 1,
) -> list[ReportRow]:
    """Run every ``(value, replication)`` pair and collect report rows.

    Rows are ordered by point, then replication, then provider; the
    order does not depend on ``workers``.

    Raises:
        ConfigurationError: invalid axis, values, ``reps`` or ``workers``.
    """
    if reps < 1:
        raise ConfigurationError("reps must be >= 1")
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    if not values:
        raise ConfigurationError("sweep needs at least one axis value")
    seeds = [derive_seed(base.seed, r) for r in range(reps)]
    jobs: list[_Job] = []
    for value in values:
        point = apply_axis(base, axis, value)
        label = format_axis_value(value)
        for r, seed in enumerate(seeds):
            jobs.append(_Job(replace(point, seed=seed), base.name, label, r))

    logger.info(
        "sweep started",
        extra={
            "scenario": base.name,
            "axis": axis,
            "points": len(values),
            "reps": reps,
            "workers": workers,
        },
    )
    if workers == 1:
        results = [_run_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    rows = [row for chunk in results for row in chunk]
    logger.info(
        "sweep finished", extra={"scenario": base.name, "rows": len(rows)}
    )
    return rows


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    """Sample mean with a 95% Student-t half-width (``None`` if n < 2)."""

    mean: float | None
    half_width: float | None
    n: int


def estimate(
    samples: Iterable[float | None], confidence: float = 0.95
) -> Estimate:
    values = [v for v in samples if v is not None]
    n = len(values)
    if n == 0:
        return Estimate(None, None, 0)
    mean = statistics.fmean(values)
    if n < 2:
        return Estimate(mean, None, n)
    sd = statistics.stdev(values)
    q = float(stats.t.ppf(0.5 + confidence / 2.0, n - 1))
    return Estimate(mean, q * sd / math.sqrt(n), n)


@dataclass(frozen=True)
class SummaryRow:
    axis_value: str
    provider: str
    r_bl: Estimate
    eta_s: Estimate
    c_e: Estimate
    active_users: Estimate


def summarize(rows: Sequence[ReportRow]) -> list[SummaryRow]:
    """Replication statistics per ``(axis_value, provider)``, in row order."""
    groups: dict[tuple[str, str], list[ReportRow]] = {}
    for row in rows:
        groups.setdefault((row.axis_value, row.provider), []).append(row)
    return [
        SummaryRow(
            axis_value=axis_value,
            provider=provider,
            r_bl=estimate(r.r_bl_global for r in group),
            eta_s=estimate(r.eta_s for r in group),
            c_e=estimate(r.c_e for r in group),
            active_users=estimate(r.active_users_mean for r in group),
        )
        for (axis_value, provider), group in groups.items()
    ]


def column(
    rows: Iterable[ReportRow], axis_value: str, name: str, provider: str = "ALL"
) -> list[float]:
    """Per-replication values of one column, ordered by replication."""
    picked = sorted(
        (
            r
            for r in rows
            if r.axis_value == axis_value and r.provider == provider
        ),
        key=lambda r: r.replication,
    )
    out: list[float] = []
    for r in picked:
        v = getattr(r, name)
        if v is not None:
            out.append(float(v))
    return out


@dataclass(frozen=True)
class PairedTest:
    statistic: float
    p_value: float
    mean_difference: float


def paired_less(a: Sequence[float], b: Sequence[float]) -> PairedTest:
    """One-sided paired t-test of ``mean(a - b) < 0``.

    Raises:
        ValueError: *a* and *b* differ in length or have fewer than two
            pairs.
    """
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    if len(a) < 2:
        raise ValueError("paired test needs at least two pairs")
    diff = [x - y for x, y in zip(a, b)]
    mean_diff = statistics.fmean(diff)
    if all(d == diff[0] for d in diff):
        # Zero variance: the t statistic is undefined.
        if mean_diff < 0:
            return PairedTest(-math.inf, 0.0, mean_diff)
        statistic = math.inf if mean_diff > 0 else math.nan
        return PairedTest(statistic, 1.0, mean_diff)
    res = stats.ttest_rel(a, b, alternative="less")
    return PairedTest(float(res.statistic), float(res.pvalue), mean_diff)
