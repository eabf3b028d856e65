"""In-memory tracer, for tests and offline checks of protocol bounds."""

from __future__ import annotations

from collections import defaultdict

from .protocol import TraceEvent


class MemoryTracer:
    def __init__(self) -> None:
        self.events: list[TraceEvent] = []

    def record(self, event: TraceEvent) -> None:
        self.events.append(event)

    def by_request(self) -> dict[int, list[TraceEvent]]:
        """Events grouped by request id, in send order."""
        grouped: dict[int, list[TraceEvent]] = defaultdict(list)
        for e in self.events:
            grouped[e.request_id].append(e)
        return dict(grouped)

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == kind]
