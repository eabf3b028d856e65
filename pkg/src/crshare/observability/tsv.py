"""Tab-separated message trace: ``time kind src dst summary`` per line."""

from __future__ import annotations

from typing import TextIO

from .protocol import TraceEvent

HEADER = "time\tkind\tsrc\tdst\tsummary\n"


class TsvTraceWriter:
    """Writes one line per message to an open text stream.

    Times are written with ``repr`` so a trace round-trips exactly and two
    runs of the same scenario produce byte-identical files.
    """

    def __init__(self, stream: TextIO, header: bool = True) -> None:
        self._stream = stream
        if header:
            stream.write(HEADER)

    def record(self, event: TraceEvent) -> None:
        self._stream.write(
            f"{event.time!r}\t{event.kind}\t{event.src}\t{event.dst}\t"
            f"{event.summary}\n"
        )
