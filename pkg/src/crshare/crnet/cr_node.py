"""Cognitive-radio node state machine.

A CR node senses every channel at each sweep and keeps a sliding window
of past results. When a base station asks for available channels it
polls its neighbours, waits for all of them or for ``reply_timeout``,
and answers with the intersection of what everyone reported free.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..world import models
from ..world.occupancy import OccupancyState
from .messages import AvailabilityEntry, Endpoint, Message, MessageKind
from .network import Network

logger = logging.getLogger(__name__)


def _no_replies() -> list[tuple[AvailabilityEntry, ...]]:
    return []


@dataclass
class _PendingRequest:
    request_id: int
    bs: Endpoint
    provider: int
    local: tuple[AvailabilityEntry, ...]
    waiting_for: set[int]
    replies: list[tuple[AvailabilityEntry, ...]] = field(
        default_factory=_no_replies
    )


class CrNode:
    """Runtime state of one CR node; the static part lives in ``site``."""

    def __init__(
        self,
        site: models.CrNode,
        cells_in_range: Sequence[int],
        channel_owners: Sequence[int],
        network: Network,
        *,
        reply_timeout: float,
        history_window: int = 10,
        false_free_prob: float = 0.0,
        false_busy_prob: float = 0.0,
        error_rng: np.random.Generator | None = None,
    ) -> None:
        self.site = site
        self.endpoint = Endpoint("cr", site.id)
        self.cells = tuple(cells_in_range)
        self._owners = tuple(channel_owners)
        self._net = network
        self._reply_timeout = reply_timeout
        self._false_free = false_free_prob
        self._false_busy = false_busy_prob
        self._error_rng = error_rng
        n = len(self._owners)
        self.available: list[bool] = [True] * n
        self._history: list[deque[bool]] = [
            deque(maxlen=history_window) for _ in range(n)
        ]
        self._shadow: frozenset[int] | None = None
        self._pending: dict[int, _PendingRequest] = {}
        self.last_sweep: float | None = None

    @property
    def id(self) -> int:
        return self.site.id

    def free_fraction(self, channel: int) -> float:
        """Share of the recent sweeps in which *channel* was sensed free."""
        hist = self._history[channel]
        if not hist:
            return 1.0 if self.available[channel] else 0.0
        return sum(hist) / len(hist)

    # ------------------------------------------------------------------
    # Sensing
    # ------------------------------------------------------------------

    def sense_sweep(self, occupancy: OccupancyState, now: float) -> list[bool]:
        """Refresh the availability map from ground truth.

        A channel is available when it is admissible in every cell within
        sensing range. With a sensing-error probability set, each result
        is then flipped with that probability.
        """
        if self._shadow is None:
            self._shadow = occupancy.shadow(self.cells)
        shadow = self._shadow
        sensed = [
            occupancy.free_for(self.cells, ch, shadow)
            for ch in range(len(self._owners))
        ]
        errors = self._false_free or self._false_busy
        if self._error_rng is not None and errors:
            flips = self._error_rng.random(len(sensed))
            for ch, free in enumerate(sensed):
                p = self._false_busy if free else self._false_free
                if flips[ch] < p:
                    sensed[ch] = not free
        self.available = sensed
        for ch, free in enumerate(sensed):
            self._history[ch].append(free)
        self.last_sweep = now
        return sensed

    def _snapshot(
        self, exclude_provider: int = -1
    ) -> tuple[AvailabilityEntry, ...]:
        return tuple(
            AvailabilityEntry(ch, self.available[ch], self.free_fraction(ch))
            for ch, owner in enumerate(self._owners)
            if owner != exclude_provider
        )

    # ------------------------------------------------------------------
    # Protocol
    # ------------------------------------------------------------------

    def receive(self, msg: Message, now: float) -> None:
        if msg.kind is MessageKind.CHANNEL_REQUEST:
            self.handle_channel_request(msg, now)
        elif msg.kind is MessageKind.NEIGHBOR_BROADCAST:
            self._handle_neighbor_broadcast(msg, now)
        elif msg.kind is MessageKind.NEIGHBOR_REPLY:
            self._handle_neighbor_reply(msg, now)
        else:
            logger.warning(
                "CR node dropped unexpected message",
                extra={"node": self.id, "kind": msg.kind.value},
            )

    def handle_channel_request(self, req: Message, now: float) -> None:
        """Poll neighbours for an overloaded base station.

        With no neighbours the local map is returned at once. Otherwise a
        NeighborBroadcast goes to each neighbour and a reply timer starts.
        """
        pending = _PendingRequest(
            request_id=req.request_id,
            bs=req.src,
            provider=req.provider,
            local=self._snapshot(req.provider),
            waiting_for=set(self.site.neighbors),
        )
        if not pending.waiting_for:
            self._respond(pending, now, partial=False)
            return
        self._pending[req.request_id] = pending
        for nb in self.site.neighbors:
            self._net.send(
                Message(
                    MessageKind.NEIGHBOR_BROADCAST,
                    src=self.endpoint,
                    dst=Endpoint("cr", nb),
                    timestamp=now,
                    request_id=req.request_id,
                    provider=req.provider,
                )
            )
        self._net.set_timer(self._reply_timeout, self, req.request_id)

    def _handle_neighbor_broadcast(self, msg: Message, now: float) -> None:
        self._net.send(
            Message(
                MessageKind.NEIGHBOR_REPLY,
                src=self.endpoint,
                dst=msg.src,
                timestamp=now,
                request_id=msg.request_id,
                provider=msg.provider,
                payload=self._snapshot(msg.provider),
            )
        )

    def _handle_neighbor_reply(self, msg: Message, now: float) -> None:
        pending = self._pending.get(msg.request_id)
        if pending is None or msg.src.id not in pending.waiting_for:
            # Late reply after a timeout already answered the request.
            return
        pending.waiting_for.discard(msg.src.id)
        pending.replies.append(msg.payload)
        if not pending.waiting_for:
            del self._pending[msg.request_id]
            self._respond(pending, now, partial=False)

    def on_timer(self, token: int, now: float) -> None:
        pending = self._pending.pop(token, None)
        if pending is None:
            return
        logger.warning(
            "CR node answered with partial availability",
            extra={
                "node": self.id,
                "request_id": token,
                "missing": sorted(pending.waiting_for),
            },
        )
        self._respond(pending, now, partial=True)

    def _respond(
        self, pending: _PendingRequest, now: float, partial: bool
    ) -> None:
        merged = merge_availability(pending.local, pending.replies)
        self._net.send(
            Message(
                MessageKind.AVAILABILITY_RESPONSE,
                src=self.endpoint,
                dst=pending.bs,
                timestamp=now,
                request_id=pending.request_id,
                provider=pending.provider,
                payload=merged,
                partial=partial,
            )
        )


def merge_availability(
    local: tuple[AvailabilityEntry, ...],
    replies: Sequence[tuple[AvailabilityEntry, ...]],
) -> tuple[AvailabilityEntry, ...]:
    """Intersect availability lists, keyed on *local*'s channels.

    A channel stays available only if every list reports it free. Its free
    fraction is the smallest one reported.
    """
    merged: list[AvailabilityEntry] = []
    others = [{e.channel_id: e for e in r} for r in replies]
    for entry in local:
        available = entry.available
        fraction = entry.free_fraction
        for other in others:
            seen = other.get(entry.channel_id)
            if seen is None:
                continue
            available = available and seen.available
            fraction = min(fraction, seen.free_fraction)
        merged.append(AvailabilityEntry(entry.channel_id, available, fraction))
    return tuple(merged)
