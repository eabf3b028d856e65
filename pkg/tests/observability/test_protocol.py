"""Tests for crshare.observability: TraceEvent, tracers and the TSV writer."""

from __future__ import annotations

import io

from crshare.crnet.messages import (
    AvailabilityEntry,
    Endpoint,
    Message,
    MessageKind,
)
from crshare.observability import (
    MemoryTracer,
    MessageTracer,
    NullTracer,
    TraceEvent,
    TsvTraceWriter,
)


def _event(**kwargs: object) -> TraceEvent:
    defaults: dict[str, object] = {
        "time": 12.5,
        "kind": "ChannelRequest",
        "src": "bs0",
        "dst": "cr3",
        "request_id": 1,
        "summary": "req=1",
    }
    defaults.update(kwargs)
    return TraceEvent(**defaults)  # type: ignore[arg-type]


class TestTraceEvent:
    def test_from_channel_response(self) -> None:
        msg = Message(
            kind=MessageKind.AVAILABILITY_RESPONSE,
            src=Endpoint("cr", 3),
            dst=Endpoint("bs", 0),
            timestamp=1.25,
            request_id=7,
            payload=(
                AvailabilityEntry(4, True, 1.0),
                AvailabilityEntry(5, False, 0.0),
                AvailabilityEntry(6, True, 0.5),
            ),
            partial=True,
        )
        event = TraceEvent.from_message(msg)
        assert event == TraceEvent(
            time=1.25,
            kind="AvailabilityResponse",
            src="cr3",
            dst="bs0",
            request_id=7,
            summary="req=7 free=4,6 partial",
        )

    def test_from_blocked_service_reply(self) -> None:
        msg = Message(
            kind=MessageKind.SERVICE_REPLY,
            src=Endpoint("bs", 2),
            dst=Endpoint("ue", 42),
            timestamp=3.0,
            request_id=9,
        )
        event = TraceEvent.from_message(msg)
        assert (event.src, event.dst) == ("bs2", "ue42")
        assert event.summary == "req=9 blocked"

    def test_granted_reply_summary(self) -> None:
        msg = Message(
            kind=MessageKind.SERVICE_REPLY,
            src=Endpoint("bs", 2),
            dst=Endpoint("ue", 42),
            timestamp=3.0,
            request_id=9,
            granted=11,
        )
        assert msg.summary() == "req=9 ch=11"


class TestTracers:
    def test_null_tracer_satisfies_protocol(self) -> None:
        tracer: MessageTracer = NullTracer()
        tracer.record(_event())

    def test_memory_tracer_groups_by_request(self) -> None:
        tracer = MemoryTracer()
        tracer.record(_event(request_id=1, time=0.0))
        tracer.record(_event(request_id=2, time=0.1, kind="NeighborBroadcast"))
        tracer.record(
            _event(request_id=1, time=0.2, kind="AvailabilityResponse")
        )
        grouped = tracer.by_request()
        assert sorted(grouped) == [1, 2]
        assert [e.time for e in grouped[1]] == [0.0, 0.2]
        assert [e.kind for e in tracer.of_kind("NeighborBroadcast")] == [
            "NeighborBroadcast"
        ]


class TestTsvTraceWriter:
    def test_header_and_line(self) -> None:
        buf = io.StringIO()
        writer = TsvTraceWriter(buf)
        writer.record(_event(time=0.1 + 0.2))
        lines = buf.getvalue().splitlines()
        assert lines[0] == "time\tkind\tsrc\tdst\tsummary"
        assert lines[1] == (
            "0.30000000000000004\tChannelRequest\tbs0\tcr3\treq=1"
        )

    def test_without_header(self) -> None:
        buf = io.StringIO()
        TsvTraceWriter(buf, header=False).record(_event())
        assert buf.getvalue().count("\n") == 1
