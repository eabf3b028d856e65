"""Event-integrated performance metrics.

The accumulator integrates piecewise-constant per-provider quantities by
rectangles between events, restricted to the observation window
``[t_start, t_end]`` (the run horizon minus warm-up). Counters only count
decisions and arrivals whose time lies in the window.

Reported per provider:

- ``R_BL``: blocked over decided calls; globally the sums are pooled
  before dividing.
- ``eta_s``: time-average share of the provider's *owned* channels that
  carry at least one user, wherever the user is. A borrowed channel in
  use counts for its owner.
- ``c_e``: ``alpha * t_obs * eta_s``.

Providers that own no channel have no ``eta_s`` or ``c_e`` (``None``).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import InvariantFault

Z_95 = 1.959963984540054


@dataclass(frozen=True, slots=True)
class DecisionRecord:
    time: float
    provider: int
    call_id: int
    blocked: bool


@dataclass(frozen=True, slots=True)
class BusySample:
    """Provider *provider* had *n_busy* busy owned channels from *time* on."""

    time: float
    provider: int
    n_busy: int


class MetricsAccumulator:
    """Per-provider counters and time integrals over the observation window.

    Args:
        owned_channels: ``N_ch_total`` per provider.
        t_start: Start of the observation window (end of warm-up).
        t_end: End of the observation window.
        user_slots: Per provider, owned channels times capacity times
            cells; the denominator of the user-weighted efficiency.
        keep_logs: Keep the decision log and the busy-channel trace.
    """

    def __init__(
        self,
        owned_channels: Sequence[int],
        t_start: float,
        t_end: float,
        user_slots: Sequence[int] | None = None,
        keep_logs: bool = False,
    ) -> None:
        if not t_end > t_start:
            raise ValueError("observation window must have positive length")
        n = len(owned_channels)
        self.owned_channels = tuple(owned_channels)
        self.user_slots = (
            tuple(user_slots) if user_slots is not None else self.owned_channels
        )
        self.t_start = t_start
        self.t_end = t_end
        self.n_blocked = [0] * n
        self.n_processed = [0] * n
        self.n_arrivals = [0] * n
        self.busy_channel_time = [0.0] * n
        self.user_time = [0.0] * n
        self.active_time = [0.0] * n
        self._n_busy = [0] * n
        self._owned_users = [0] * n
        self._active = [0] * n
        self._last = 0.0
        self.keep_logs = keep_logs
        self.decisions: list[DecisionRecord] = []
        self.busy_trace: list[BusySample] = []

    @property
    def n_providers(self) -> int:
        return len(self.owned_channels)

    @property
    def t_obs(self) -> float:
        return self.t_end - self.t_start

    @property
    def last_time(self) -> float:
        return self._last

    def n_busy(self, provider: int) -> int:
        return self._n_busy[provider]

    def _in_window(self, t: float) -> bool:
        return self.t_start <= t <= self.t_end

    def advance(self, now: float) -> None:
        """Integrate every provider's current levels up to *now*.

        Raises:
            InvariantFault: *now* is earlier than the last event.
        """
        if now < self._last:
            raise InvariantFault(
                "metrics time regression", {"now": now, "last": self._last}
            )
        lo = max(self._last, self.t_start)
        hi = min(now, self.t_end)
        if hi > lo:
            dt = hi - lo
            for p in range(len(self._n_busy)):
                self.busy_channel_time[p] += self._n_busy[p] * dt
                self.user_time[p] += self._owned_users[p] * dt
                self.active_time[p] += self._active[p] * dt
        self._last = now

    def record_arrival(self, provider: int, now: float) -> None:
        if self._in_window(now):
            self.n_arrivals[provider] += 1

    def record_decision(
        self, provider: int, blocked: bool, now: float, call_id: int = -1
    ) -> None:
        self.advance(now)
        if not self._in_window(now):
            return
        self.n_processed[provider] += 1
        if blocked:
            self.n_blocked[provider] += 1
        if self.keep_logs:
            self.decisions.append(
                DecisionRecord(now, provider, call_id, blocked)
            )

    def record_occupancy_change(
        self,
        provider: int,
        n_busy_new: int,
        now: float,
        *,
        owned_users: int | None = None,
    ) -> None:
        """Set the owner's busy-channel count (and user count) from *now* on."""
        if not 0 <= n_busy_new <= self.owned_channels[provider]:
            raise InvariantFault(
                "busy channels out of range",
                {"provider": provider, "n_busy": n_busy_new},
            )
        self.advance(now)
        if self.keep_logs and n_busy_new != self._n_busy[provider]:
            self.busy_trace.append(BusySample(now, provider, n_busy_new))
        self._n_busy[provider] = n_busy_new
        if owned_users is not None:
            self._owned_users[provider] = owned_users

    def record_active_change(
        self, provider: int, active: int, now: float
    ) -> None:
        """Set the number of the provider's calls in service from *now* on."""
        self.advance(now)
        self._active[provider] = active

    def finish(self) -> None:
        self.advance(max(self._last, self.t_end))


def blocking_rate(acc: MetricsAccumulator) -> float | None:
    """Pooled R_BL over all providers; ``None`` when nothing was decided."""
    processed = sum(acc.n_processed)
    if processed == 0:
        return None
    return sum(acc.n_blocked) / processed


def provider_blocking_rate(
    acc: MetricsAccumulator, provider: int
) -> float | None:
    if acc.n_processed[provider] == 0:
        return None
    return acc.n_blocked[provider] / acc.n_processed[provider]


def spectrum_efficiency(acc: MetricsAccumulator, provider: int) -> float | None:
    owned = acc.owned_channels[provider]
    if owned == 0:
        return None
    return acc.busy_channel_time[provider] / (owned * acc.t_obs)


def revenue_efficiency(
    acc: MetricsAccumulator, provider: int, alpha: float
) -> float | None:
    eta = spectrum_efficiency(acc, provider)
    return None if eta is None else alpha * acc.t_obs * eta


def binomial_half_width(
    p: float | None, n: int, z: float = Z_95
) -> float | None:
    """Normal-approximation half-width of a proportion."""
    if p is None or n == 0:
        return None
    return z * math.sqrt(p * (1.0 - p) / n)


@dataclass(frozen=True)
class ProviderMetrics:
    """One report row. ``provider`` is ``None`` for the pooled row."""

    provider: int | None
    n_blocked: int
    n_processed: int
    n_arrivals: int
    r_bl: float | None
    r_bl_half_width: float | None
    eta_s: float | None
    eta_s_user_weighted: float | None
    c_e: float | None
    active_users_mean: float
    traffic_load_offered: float
    owned_channels: int

    @property
    def label(self) -> str:
        return "ALL" if self.provider is None else str(self.provider)


@dataclass(frozen=True)
class MetricsReport:
    t_obs: float
    r_bl: float | None
    r_bl_half_width: float | None
    providers: tuple[ProviderMetrics, ...]
    total: ProviderMetrics

    @property
    def eta_s(self) -> float | None:
        return self.total.eta_s

    @property
    def system_efficiency(self) -> float | None:
        """Reported alongside ``eta_s``; the two are the same quantity."""
        return self.total.eta_s

    def rows(self) -> tuple[ProviderMetrics, ...]:
        return (*self.providers, self.total)


def build_report(
    acc: MetricsAccumulator, alphas: Sequence[float], mean_holding: float
) -> MetricsReport:
    """Fold a finished accumulator into per-provider and pooled rows."""
    t = acc.t_obs
    rows: list[ProviderMetrics] = []
    for p in range(acc.n_providers):
        r_bl = provider_blocking_rate(acc, p)
        eta = spectrum_efficiency(acc, p)
        slots = acc.user_slots[p]
        rows.append(
            ProviderMetrics(
                provider=p,
                n_blocked=acc.n_blocked[p],
                n_processed=acc.n_processed[p],
                n_arrivals=acc.n_arrivals[p],
                r_bl=r_bl,
                r_bl_half_width=binomial_half_width(r_bl, acc.n_processed[p]),
                eta_s=eta,
                eta_s_user_weighted=(
                    None if slots == 0 else acc.user_time[p] / (slots * t)
                ),
                c_e=None if eta is None else alphas[p] * t * eta,
                active_users_mean=acc.active_time[p] / t,
                traffic_load_offered=acc.n_arrivals[p] * mean_holding / t,
                owned_channels=acc.owned_channels[p],
            )
        )

    r_bl = blocking_rate(acc)
    processed = sum(acc.n_processed)
    owned = sum(acc.owned_channels)
    slots = sum(acc.user_slots)
    revenues = [r.c_e for r in rows if r.c_e is not None]
    total = ProviderMetrics(
        provider=None,
        n_blocked=sum(acc.n_blocked),
        n_processed=processed,
        n_arrivals=sum(acc.n_arrivals),
        r_bl=r_bl,
        r_bl_half_width=binomial_half_width(r_bl, processed),
        eta_s=None if owned == 0 else sum(acc.busy_channel_time) / (owned * t),
        eta_s_user_weighted=(
            None if slots == 0 else sum(acc.user_time) / (slots * t)
        ),
        c_e=sum(revenues) if revenues else None,
        active_users_mean=sum(r.active_users_mean for r in rows),
        traffic_load_offered=sum(r.traffic_load_offered for r in rows),
        owned_channels=owned,
    )
    return MetricsReport(
        t_obs=t,
        r_bl=r_bl,
        r_bl_half_width=total.r_bl_half_width,
        providers=tuple(rows),
        total=total,
    )
