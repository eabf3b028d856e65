"""Event kinds and the deterministic event queue."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from enum import IntEnum
from typing import Any


class EventKind(IntEnum):
    """Kinds in their tie-break order at equal timestamps.

    Departures come first so capacity freed at an instant is visible to
    arrivals at the same instant.
    """

    DEPARTURE = 0
    MESSAGE_DELIVERY = 1
    TIMER = 2
    SENSE_SWEEP = 3
    ARRIVAL = 4
    RATE_REDRAW = 5
    END_OF_RUN = 6


@dataclass(frozen=True, slots=True)
class Event:
    time: float
    kind: EventKind
    sequence: int
    payload: Any = None


class EventQueue:
    """Min-heap ordered by ``(time, kind, sequence)``.

    ``sequence`` is a global insertion counter, so the order is total and
    independent of payloads.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, int, Event]] = []
        self._seq = itertools.count()

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, time: float, kind: EventKind, payload: Any = None) -> Event:
        event = Event(time, kind, next(self._seq), payload)
        heapq.heappush(self._heap, (time, int(kind), event.sequence, event))
        return event

    def pop(self) -> Event:
        return heapq.heappop(self._heap)[3]

    def clear(self) -> int:
        """Drop every queued event; return how many were dropped."""
        n = len(self._heap)
        self._heap.clear()
        return n
