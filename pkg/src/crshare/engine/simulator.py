"""crshare simulation engine: the discrete-event loop of one run.

One run proceeds as follows:
  1. Build the world (grid, channels, occupancy) and, when sharing is
     enabled, one CR node per grid vertex and one base station per cell.
  2. Seed the queue with a RateRedraw at t=0 (which schedules the first
     arrival of every provider), the first SenseSweep and EndOfRun.
  3. Pop events in ``(time, kind, sequence)`` order until EndOfRun; any
     event still queued then (in-flight messages, departures past the
     horizon) is dropped.

An arrival is admitted on the lowest-id admissible owned channel. If
there is none, the call is blocked when sharing is disabled, and handed to
the cell's base station for a borrowing round-trip otherwise.

Rate redraws bump a per-provider generation counter; arrivals scheduled
under an older generation are discarded when popped.

``InvariantFault`` is never caught and recovered from: the loop re-raises
it enriched with the simulator state at the failing event.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

from ..config import Scenario
from ..crnet.base_station import BaseStation, SbacSettings
from ..crnet.cr_node import CrNode
from ..crnet.messages import Message
from ..crnet.network import TimerTarget
from ..errors import InvariantFault
from ..metrics import (
    BusySample,
    DecisionRecord,
    MetricsAccumulator,
    MetricsReport,
    build_report,
)
from ..observability.protocol import MessageTracer, NullTracer, TraceEvent
from ..sbac import SbacWeights
from ..traffic.model import (
    Call,
    TrafficModel,
    draw_holding,
    next_arrival,
    sample_rates,
)
from ..traffic.streams import Purpose, RngStreams
from ..world.world import World
from .events import Event, EventKind, EventQueue

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CallCounters:
    """Whole-run call accounting per provider (warm-up included).

    The following invariant holds at every event boundary::

        arrivals == blocked + completed + active + waiting
    """

    arrivals: tuple[int, ...]
    blocked: tuple[int, ...]
    completed: tuple[int, ...]
    active: tuple[int, ...]
    waiting: tuple[int, ...]


@dataclass(frozen=True)
class RunResult:
    """Outcome of ``run()``.

    ``decisions`` and ``busy_trace`` are empty unless the run was started
    with ``keep_logs=True``. ``protocol`` sums the base-station counters
    of all cells (all zero when sharing is disabled).
    """

    scenario: Scenario
    report: MetricsReport
    counters: CallCounters
    events_processed: int
    events_dropped: int
    protocol: dict[str, int]
    final_state_hash: str
    decisions: tuple[DecisionRecord, ...] = field(default=())
    busy_trace: tuple[BusySample, ...] = field(default=())


class Simulation:
    """Single-run state. Not reusable: build one per ``run()``."""

    def __init__(
        self,
        scenario: Scenario,
        tracer: MessageTracer | None = None,
        keep_logs: bool = False,
        audit: bool = False,
    ) -> None:
        self.scenario = scenario
        self.world = World.from_scenario(scenario)
        self._tracer: MessageTracer = (
            tracer if tracer is not None else NullTracer()
        )
        self._tracing = not isinstance(self._tracer, NullTracer)
        self._audit = audit
        self._streams = RngStreams(scenario.seed)
        n = scenario.topology.n_providers
        self._n = n
        self.traffic = TrafficModel.from_config(scenario.traffic, n)
        self._rates = self.traffic.mean_rates.copy()
        self._generation = [0] * n
        self._queue = EventQueue()
        self._now = 0.0
        self._t_end = scenario.t_obs_s
        self._latency = scenario.protocol.message_latency_s
        self._call_ids = itertools.count()

        self._arrivals = [0] * n
        self._blocked = [0] * n
        self._completed = [0] * n
        self._active = [0] * n
        self._waiting = [0] * n
        self._queued: set[int] = set()

        self._channel_users = [0] * self.world.n_channels
        self._n_busy = [0] * n
        self._owned_users = [0] * n

        owned = [len(p.licensed_channels) for p in self.world.providers]
        cells = scenario.topology.cells_per_provider
        self.metrics = MetricsAccumulator(
            owned_channels=owned,
            t_start=scenario.warmup_s,
            t_end=scenario.t_obs_s,
            user_slots=[k * scenario.channels.capacity * cells for k in owned],
            keep_logs=keep_logs,
        )

        self.cr_nodes: list[CrNode] = []
        self.stations: list[BaseStation] = []
        if scenario.sharing_enabled:
            self._build_overlay()

    def _build_overlay(self) -> None:
        sc = self.scenario
        topo = self.world.topology
        owners = [c.owner for c in self.world.channels]
        proto = sc.protocol
        error_rng = None
        if proto.false_free_prob or proto.false_busy_prob:
            error_rng = self._streams.get(Purpose.SENSING)
        self.cr_nodes = [
            CrNode(
                site,
                topo.cells_in_range(site.id),
                owners,
                self,
                reply_timeout=proto.reply_timeout_s,
                history_window=sc.sbac.history_window,
                false_free_prob=proto.false_free_prob,
                false_busy_prob=proto.false_busy_prob,
                error_rng=error_rng,
            )
            for site in topo.cr_nodes
        ]
        settings = SbacSettings(
            weights=SbacWeights.from_config(sc.sbac),
            t_call_min=sc.t_call_min,
            prob_mode=sc.sbac.prob_mode,
            inter_unit_hz=sc.channels.spacing_hz,
        )
        request_ids = itertools.count()
        self.stations = [
            BaseStation(
                cell.id,
                self.world,
                self,
                self,
                settings,
                request_ids,
                pending_timeout=proto.pending_timeout_s,
            )
            for cell in topo.cells
        ]

    # ------------------------------------------------------------------
    # Network
    # ------------------------------------------------------------------

    def send(self, msg: Message) -> None:
        if self._tracing:
            self._tracer.record(TraceEvent.from_message(msg))
        self._queue.push(
            self._now + self._latency, EventKind.MESSAGE_DELIVERY, msg
        )

    def note(self, msg: Message) -> None:
        if self._tracing:
            self._tracer.record(TraceEvent.from_message(msg))

    def set_timer(self, delay: float, target: TimerTarget, token: int) -> None:
        self._queue.push(self._now + delay, EventKind.TIMER, (target, token))

    # ------------------------------------------------------------------
    # Admission
    # ------------------------------------------------------------------

    def admit(self, call: Call, channel: int, now: float) -> None:
        p = call.provider
        owner = self.world.owner_of(channel)
        if owner != p and not self.scenario.sharing_enabled:
            raise InvariantFault(
                "foreign channel used with sharing disabled",
                {"call": call.id, "provider": p, "channel": channel},
            )
        self._unqueue(call)
        self.world.occupy(call.cell, channel)
        self._channel_users[channel] += 1
        self._owned_users[owner] += 1
        if self._channel_users[channel] == 1:
            self._n_busy[owner] += 1
        self.metrics.record_occupancy_change(
            owner,
            self._n_busy[owner],
            now,
            owned_users=self._owned_users[owner],
        )
        self._active[p] += 1
        self.metrics.record_active_change(p, self._active[p], now)
        self.metrics.record_decision(p, False, now, call.id)
        self._queue.push(
            now + call.holding_time, EventKind.DEPARTURE, (call, channel)
        )

    def block(self, call: Call, now: float) -> None:
        self._unqueue(call)
        self._blocked[call.provider] += 1
        self.metrics.record_decision(call.provider, True, now, call.id)

    def _unqueue(self, call: Call) -> None:
        if call.id in self._queued:
            self._queued.discard(call.id)
            self._waiting[call.provider] -= 1

    # ------------------------------------------------------------------
    # Event handlers
    # ------------------------------------------------------------------

    def _on_rate_redraw(self, now: float) -> None:
        rates = sample_rates(self.traffic, self._streams.get(Purpose.RATES))
        self._rates = rates
        for p in range(self._n):
            self._generation[p] += 1
            self._schedule_arrival(p, now)
        nxt = now + self.traffic.epoch_length
        if nxt < self._t_end:
            self._queue.push(nxt, EventKind.RATE_REDRAW)

    def _schedule_arrival(self, provider: int, now: float) -> None:
        t = next_arrival(
            float(self._rates[provider]),
            now,
            self._streams.get(Purpose.ARRIVALS, provider),
        )
        if t < self._t_end:
            self._queue.push(
                t, EventKind.ARRIVAL, (provider, self._generation[provider])
            )

    def _on_arrival(self, now: float, provider: int, generation: int) -> None:
        if generation != self._generation[provider]:
            return
        cells = self.world.providers[provider].cells
        if len(cells) == 1:
            cell = cells[0]
        else:
            pick = self._streams.get(Purpose.CELL_PICK, provider)
            cell = cells[int(pick.integers(len(cells)))]
        holding = draw_holding(
            self.traffic.mean_holding,
            self._streams.get(Purpose.HOLDING, provider),
        )
        call = Call(next(self._call_ids), provider, cell, now, holding)
        self._arrivals[provider] += 1
        self.metrics.record_arrival(provider, now)
        self._schedule_arrival(provider, now)

        if self.stations:
            station = self.stations[cell]
            # Calls already waiting here keep their place in line.
            station.serve_waiting(now)
            channel = None if station.waiting else station.direct_channel()
            if channel is not None:
                self.admit(call, channel, now)
            else:
                self._queued.add(call.id)
                self._waiting[provider] += 1
                station.enqueue(call, now)
            return
        owned = self.world.owned_channels(provider)
        channel = self.world.first_admissible(cell, owned)
        if channel is None:
            self.block(call, now)
        else:
            self.admit(call, channel, now)

    def _on_departure(self, now: float, call: Call, channel: int) -> None:
        owner = self.world.owner_of(channel)
        self.world.release(call.cell, channel)
        self._channel_users[channel] -= 1
        self._owned_users[owner] -= 1
        if self._channel_users[channel] == 0:
            self._n_busy[owner] -= 1
        self.metrics.record_occupancy_change(
            owner,
            self._n_busy[owner],
            now,
            owned_users=self._owned_users[owner],
        )
        p = call.provider
        self._active[p] -= 1
        self._completed[p] += 1
        self.metrics.record_active_change(p, self._active[p], now)
        for station in self.stations:
            if station.waiting:
                station.serve_waiting(now)

    def _on_sense_sweep(self, now: float) -> None:
        occupancy = self.world.occupancy
        for node in self.cr_nodes:
            node.sense_sweep(occupancy, now)
        for station in self.stations:
            station.release_borrowed(now)
        nxt = now + self.scenario.protocol.sensing_period_s
        if nxt < self._t_end:
            self._queue.push(nxt, EventKind.SENSE_SWEEP)

    def _deliver(self, msg: Message, now: float) -> None:
        if msg.dst.role == "cr":
            self.cr_nodes[msg.dst.id].receive(msg, now)
        elif msg.dst.role == "bs":
            self.stations[msg.dst.id].receive(msg, now)

    # ------------------------------------------------------------------
    # Loop
    # ------------------------------------------------------------------

    def _dispatch(self, event: Event) -> None:
        kind = event.kind
        now = event.time
        if kind is EventKind.DEPARTURE:
            call, channel = event.payload
            self._on_departure(now, call, channel)
        elif kind is EventKind.ARRIVAL:
            provider, generation = event.payload
            self._on_arrival(now, provider, generation)
        elif kind is EventKind.MESSAGE_DELIVERY:
            self._deliver(event.payload, now)
        elif kind is EventKind.TIMER:
            target, token = event.payload
            target.on_timer(token, now)
        elif kind is EventKind.SENSE_SWEEP:
            self._on_sense_sweep(now)
        elif kind is EventKind.RATE_REDRAW:
            self._on_rate_redraw(now)

    def check_invariants(self) -> None:
        """Cheap consistency checks run after every event.

        Raises:
            InvariantFault: call conservation or the user total is broken.
        """
        for p in range(self._n):
            settled = (
                self._blocked[p]
                + self._completed[p]
                + self._active[p]
                + self._waiting[p]
            )
            if settled != self._arrivals[p]:
                raise InvariantFault(
                    "call conservation violated",
                    {"provider": p, **self._counters()},
                )
        if self.world.occupancy.total_users != sum(self._active):
            raise InvariantFault(
                "occupied channels disagree with calls in service",
                {
                    "users": self.world.occupancy.total_users,
                    "active": sum(self._active),
                },
            )
        if self._audit:
            self.world.occupancy.check_consistency()

    def _counters(self) -> dict[str, object]:
        return {
            "arrivals": list(self._arrivals),
            "blocked": list(self._blocked),
            "completed": list(self._completed),
            "active": list(self._active),
            "waiting": list(self._waiting),
        }

    def run(self) -> RunResult:
        sc = self.scenario
        logger.info(
            "run started",
            extra={
                "scenario": sc.name,
                "seed": sc.seed,
                "t_obs": sc.t_obs_s,
                "sharing": sc.sharing_enabled,
            },
        )
        queue = self._queue
        queue.push(0.0, EventKind.RATE_REDRAW)
        if self.cr_nodes:
            queue.push(0.0, EventKind.SENSE_SWEEP)
        queue.push(self._t_end, EventKind.END_OF_RUN)

        processed = 0
        last_time = -math.inf
        while queue:
            event = queue.pop()
            if event.time < last_time:
                raise InvariantFault(
                    "event time went backwards",
                    {"time": event.time, "last": last_time},
                )
            last_time = event.time
            self._now = event.time
            if event.kind is EventKind.END_OF_RUN:
                processed += 1
                break
            try:
                self._dispatch(event)
                self.check_invariants()
            except InvariantFault as exc:
                state: dict[str, object] = {
                    **exc.state,
                    "time": event.time,
                    "event": event.kind.name,
                    "sequence": event.sequence,
                    "events_processed": processed,
                    **self._counters(),
                }
                logger.error(
                    "invariant fault", extra={"fault": str(exc), "state": state}
                )
                raise InvariantFault(str(exc), state) from exc
            processed += 1

        dropped = queue.clear()
        self.metrics.finish()
        alphas = [p.alpha for p in self.world.providers]
        report = build_report(self.metrics, alphas, self.traffic.mean_holding)
        protocol: dict[str, int] = {}
        for station in self.stations:
            for key, value in vars(station.stats).items():
                protocol[key] = protocol.get(key, 0) + int(value)
        counters = CallCounters(
            arrivals=tuple(self._arrivals),
            blocked=tuple(self._blocked),
            completed=tuple(self._completed),
            active=tuple(self._active),
            waiting=tuple(self._waiting),
        )
        logger.info(
            "run finished",
            extra={
                "scenario": sc.name,
                "seed": sc.seed,
                "events": processed,
                "r_bl": report.r_bl,
                "arrivals": sum(self._arrivals),
            },
        )
        return RunResult(
            scenario=sc,
            report=report,
            counters=counters,
            events_processed=processed,
            events_dropped=dropped,
            protocol=protocol,
            final_state_hash=self.world.occupancy.state_hash(),
            decisions=tuple(self.metrics.decisions),
            busy_trace=tuple(self.metrics.busy_trace),
        )


def run(
    scenario: Scenario,
    tracer: MessageTracer | None = None,
    keep_logs: bool = False,
    audit: bool = False,
) -> RunResult:
    """Run one scenario to its horizon.

    Args:
        scenario: A validated scenario; its ``seed`` fixes every draw.
        tracer: Receives one record per protocol message.
        keep_logs: Keep the per-call decision log and busy-channel trace.
        audit: Also recompute the full occupancy consistency check after
            every event (slow; for tests).

    Returns:
        The metrics report and run counters. The same scenario always
        produces an identical result.

    Raises:
        ConfigurationError: the traffic covariance is not PSD.
        InvariantFault: the simulator reached an impossible state.
    """
    return Simulation(scenario, tracer, keep_logs, audit).run()
