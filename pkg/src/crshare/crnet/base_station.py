"""Base station state machine for cross-provider borrowing.

An arrival that finds no admissible owned or leased channel waits at the
base station. The first waiting call opens an overload episode: one
ChannelRequest per CR node on the cell's vertices. When every node has
answered, the episode resolves and the waiting calls are decided in
arrival order:

1. an owned channel, if one became admissible meanwhile;
2. a channel this cell already leases;
3. the SBAC best candidate, then the next best if the first is no longer
   admissible (contention with another cell);
4. otherwise the call is blocked.

Before resolution, ``serve_waiting`` gives any channel that frees up to
the oldest waiting call, and a new arrival queues behind calls already
waiting. A call whose ``pending_timeout`` expires before resolution is
blocked at its deadline. Borrowed channels stay leased until
``release_borrowed`` finds them idle and the owned channels able to
absorb the load.
"""

from __future__ import annotations

import logging
from collections import OrderedDict
from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Protocol

from ..sbac import (
    ChannelCandidate,
    CostParams,
    SbacWeights,
    availability_prob,
    channel_cost,
    score_candidates,
    select_best,
)
from ..traffic.model import Call
from ..world.world import World
from .messages import Endpoint, Message, MessageKind
from .network import Network

logger = logging.getLogger(__name__)

_MAX_GRANT_ATTEMPTS = 2


class BsPhase(Enum):
    IDLE = "idle"
    AWAITING_RESPONSES = "awaiting_responses"


class AdmissionContext(Protocol):
    """Engine callbacks that settle a call's fate."""

    def admit(self, call: Call, channel: int, now: float) -> None: ...

    def block(self, call: Call, now: float) -> None: ...


@dataclass(frozen=True)
class SbacSettings:
    weights: SbacWeights
    t_call_min: float
    prob_mode: Literal["global", "history"] = "global"
    inter_unit_hz: float = 200e3


@dataclass
class BsStats:
    episodes: int = 0
    requests_sent: int = 0
    responses_received: int = 0
    partial_responses: int = 0
    grants: int = 0
    contention_retries: int = 0
    timeouts: int = 0
    releases: int = 0


class BaseStation:
    """Borrowing logic of the base station serving one cell."""

    def __init__(
        self,
        cell: int,
        world: World,
        network: Network,
        context: AdmissionContext,
        sbac: SbacSettings,
        request_ids: Iterator[int],
        *,
        pending_timeout: float,
    ) -> None:
        self.cell = cell
        self.provider = world.provider_of(cell)
        self.endpoint = Endpoint("bs", cell)
        self.cr_nodes: tuple[int, ...] = world.topology.cr_nodes_of(cell)
        self._world = world
        self._net = network
        self._ctx = context
        self._sbac = sbac
        self._request_ids = request_ids
        self._pending_timeout = pending_timeout
        self._owned = world.owned_channels(self.provider)
        self._foreign = world.foreign_channels(self.provider)
        self.phase = BsPhase.IDLE
        self.request_id: int | None = None
        self._responses: dict[int, Message] = {}
        self._waiting: OrderedDict[int, Call] = OrderedDict()
        self.stats = BsStats()

    # ------------------------------------------------------------------
    # State
    # ------------------------------------------------------------------

    @property
    def overloaded(self) -> bool:
        """True iff no owned channel can take a new call here."""
        return self._world.first_admissible(self.cell, self._owned) is None

    @property
    def waiting(self) -> int:
        return len(self._waiting)

    @property
    def borrowed(self) -> list[int]:
        return self._world.occupancy.leases_of(self.cell)

    @property
    def _trace_request_id(self) -> int:
        return self.request_id if self.request_id is not None else -1

    def direct_channel(self) -> int | None:
        """Owned admissible channel (lowest id), else a leased one."""
        ch = self._world.first_admissible(self.cell, self._owned)
        if ch is None:
            ch = self._world.first_admissible(self.cell, self.borrowed)
        return ch

    def serve_waiting(self, now: float) -> int:
        """Admit waiting calls, oldest first, while a direct channel is free.

        Returns how many calls were admitted.
        """
        served = 0
        while self._waiting:
            ch = self.direct_channel()
            if ch is None:
                break
            _, call = self._waiting.popitem(last=False)
            self._grant(call, ch, now)
            served += 1
        return served

    # ------------------------------------------------------------------
    # Overload episode
    # ------------------------------------------------------------------

    def enqueue(self, call: Call, now: float) -> None:
        """Hold *call* for a borrowing round-trip and start one if needed."""
        self._waiting[call.id] = call
        self._net.set_timer(self._pending_timeout, self, call.id)
        self.handle_overload(now)
        # Traced after the episode opens so it carries the request id.
        self._net.note(
            Message(
                MessageKind.SERVICE_REQUEST,
                src=Endpoint("ue", call.id),
                dst=self.endpoint,
                timestamp=now,
                request_id=self._trace_request_id,
                provider=self.provider,
            )
        )

    def handle_overload(self, now: float) -> int:
        """Ask the cell's CR nodes for available channels.

        Returns the number of ChannelRequests sent: zero when the cell is
        not overloaded or an episode is already pending.
        """
        if self.phase is BsPhase.AWAITING_RESPONSES or not self.overloaded:
            return 0
        request_id = next(self._request_ids)
        self.phase = BsPhase.AWAITING_RESPONSES
        self.request_id = request_id
        self._responses = {}
        self.stats.episodes += 1
        for node in self.cr_nodes:
            self._net.send(
                Message(
                    MessageKind.CHANNEL_REQUEST,
                    src=self.endpoint,
                    dst=Endpoint("cr", node),
                    timestamp=now,
                    request_id=request_id,
                    provider=self.provider,
                )
            )
        self.stats.requests_sent += len(self.cr_nodes)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(
                "overload episode opened",
                extra={
                    "cell": self.cell,
                    "request_id": request_id,
                    "waiting": len(self._waiting),
                    "time": now,
                },
            )
        return len(self.cr_nodes)

    def receive(self, msg: Message, now: float) -> None:
        if msg.kind is MessageKind.AVAILABILITY_RESPONSE:
            self.handle_availability_response(msg, now)
        else:
            logger.warning(
                "base station dropped unexpected message",
                extra={"cell": self.cell, "kind": msg.kind.value},
            )

    def handle_availability_response(self, msg: Message, now: float) -> None:
        """Collect one CR answer; resolve the episode once all are in."""
        if (
            self.phase is not BsPhase.AWAITING_RESPONSES
            or msg.request_id != self.request_id
            or msg.src.id in self._responses
        ):
            return
        self._responses[msg.src.id] = msg
        self.stats.responses_received += 1
        if msg.partial:
            self.stats.partial_responses += 1
        if len(self._responses) == len(self.cr_nodes):
            self._resolve(now)

    def on_timer(self, token: int, now: float) -> None:
        call = self._waiting.pop(token, None)
        if call is None:
            return
        self.stats.timeouts += 1
        self._reply(call, None, now)
        self._ctx.block(call, now)

    def candidates(self) -> list[ChannelCandidate]:
        """Union of the channels any CR node reported available."""
        free: dict[int, float] = {}
        for node in sorted(self._responses):
            for entry in self._responses[node].payload:
                if entry.available:
                    free[entry.channel_id] = min(
                        free.get(entry.channel_id, 1.0), entry.free_fraction
                    )
        if not free:
            return []
        world = self._world
        global_prob = availability_prob(len(free), max(len(self._foreign), 1))
        out: list[ChannelCandidate] = []
        for ch in sorted(free):
            channel = world.channels[ch]
            owner_alpha = world.providers[channel.owner].alpha
            prob = global_prob if self._sbac.prob_mode == "global" else free[ch]
            out.append(
                ChannelCandidate(
                    channel_id=ch,
                    ch_freq=channel.center_freq_hz,
                    prob=prob,
                    cost=channel_cost(
                        CostParams(self._sbac.t_call_min, owner_alpha)
                    ),
                )
            )
        return out

    def _resolve(self, now: float) -> None:
        scored = score_candidates(
            self.candidates(), self._sbac.weights, self._sbac.inter_unit_hz
        )
        stale: set[int] = set()
        occupancy = self._world.occupancy
        while self._waiting:
            _, call = self._waiting.popitem(last=False)
            ch = self.direct_channel()
            if ch is not None:
                self._grant(call, ch, now)
                continue
            attempts = 0
            while attempts < _MAX_GRANT_ATTEMPTS:
                cand = select_best(
                    s
                    for s in scored
                    if s.channel_id not in stale
                    and not occupancy.has_lease(self.cell, s.channel_id)
                )
                if cand is None:
                    break
                if occupancy.is_admissible(self.cell, cand):
                    occupancy.lease(self.cell, cand)
                    self.stats.grants += 1
                    ch = cand
                    break
                stale.add(cand)
                attempts += 1
                self.stats.contention_retries += 1
            if ch is None:
                if attempts:
                    logger.warning(
                        "call blocked after contention retry",
                        extra={"cell": self.cell, "call": call.id, "time": now},
                    )
                self._reply(call, None, now)
                self._ctx.block(call, now)
            else:
                self._grant(call, ch, now)
        self.phase = BsPhase.IDLE
        self.request_id = None
        self._responses = {}

    def _grant(self, call: Call, channel: int, now: float) -> None:
        self._reply(call, channel, now)
        self._ctx.admit(call, channel, now)

    def _reply(self, call: Call, channel: int | None, now: float) -> None:
        self._net.note(
            Message(
                MessageKind.SERVICE_REPLY,
                src=self.endpoint,
                dst=Endpoint("ue", call.id),
                timestamp=now,
                request_id=self._trace_request_id,
                provider=self.provider,
                granted=channel,
            )
        )

    # ------------------------------------------------------------------
    # Release
    # ------------------------------------------------------------------

    def release_borrowed(self, now: float) -> list[int]:
        """Return idle borrowed channels once owned ones suffice.

        A lease is released only when it carries no call, no call is
        waiting here, and the cell is not overloaded. A provider without
        licensed channels is always overloaded, so for it only the first
        two conditions apply. Active calls are never preempted.
        """
        if self._waiting or (self._owned and self.overloaded):
            return []
        occupancy = self._world.occupancy
        released: list[int] = []
        for ch in self.borrowed:
            if occupancy.count(self.cell, ch) == 0:
                occupancy.unlease(self.cell, ch)
                released.append(ch)
        if released:
            self.stats.releases += len(released)
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug(
                    "borrowed channels released",
                    extra={
                        "cell": self.cell,
                        "channels": released,
                        "time": now,
                    },
                )
        return released

