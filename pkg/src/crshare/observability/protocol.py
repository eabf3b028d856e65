"""MessageTracer protocol and supporting types.

Provides a per-message trace of the spectrum management network for
replay and debugging. Complements the aggregate figures of
``MetricsReport`` with one record per protocol message.

The ``NullTracer`` no-op default means runs that don't need tracing pay
no formatting cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from ..crnet.messages import Message


@dataclass(frozen=True, slots=True)
class TraceEvent:
    """One protocol message as seen at its send time.

    ``src`` and ``dst`` are rendered endpoints (``bs3``, ``cr7``, ``ue42``).
    ``summary`` is a short, human-readable digest of the payload.
    """

    time: float
    kind: str
    src: str
    dst: str
    request_id: int
    summary: str

    @classmethod
    def from_message(cls, msg: Message) -> TraceEvent:
        return cls(
            time=msg.timestamp,
            kind=msg.kind.value,
            src=str(msg.src),
            dst=str(msg.dst),
            request_id=msg.request_id,
            summary=msg.summary(),
        )


class MessageTracer(Protocol):
    """Structural protocol for message tracers.

    Implementations persist ``TraceEvent`` records to any backend (a TSV
    stream, SQLite, a list in memory for tests, ...). The engine only
    imports this protocol; the concrete tracer is supplied by the caller.
    """

    def record(self, event: TraceEvent) -> None:
        """Persist one trace event."""
        ...


class NullTracer:
    """No-op default."""

    def record(self, event: TraceEvent) -> None:  # noqa: ARG002
        pass
