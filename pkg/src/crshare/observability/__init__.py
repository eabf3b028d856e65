"""Public surface for crshare.observability."""

from .memory import MemoryTracer
from .protocol import MessageTracer, NullTracer, TraceEvent
from .tsv import TsvTraceWriter

__all__ = [
    "MemoryTracer",
    "MessageTracer",
    "NullTracer",
    "TraceEvent",
    "TsvTraceWriter",
]
