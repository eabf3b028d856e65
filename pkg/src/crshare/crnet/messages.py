"""Messages exchanged on the spectrum management network."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal, NamedTuple

Role = Literal["ue", "bs", "cr"]


class Endpoint(NamedTuple):
    """Address of a message end: a mobile (``ue``), base station or CR node.

    Base stations are addressed by cell id, mobiles by call id.
    """

    role: Role
    id: int

    def __str__(self) -> str:
        return f"{self.role}{self.id}"


class MessageKind(str, Enum):
    SERVICE_REQUEST = "ServiceRequest"
    CHANNEL_REQUEST = "ChannelRequest"
    NEIGHBOR_BROADCAST = "NeighborBroadcast"
    NEIGHBOR_REPLY = "NeighborReply"
    AVAILABILITY_RESPONSE = "AvailabilityResponse"
    SERVICE_REPLY = "ServiceReply"


@dataclass(frozen=True, slots=True)
class AvailabilityEntry:
    channel_id: int
    available: bool
    free_fraction: float


@dataclass(frozen=True, slots=True)
class Message:
    """One protocol message.

    ``request_id`` ties every message of an overload episode together.
    ``provider`` is the requesting provider, carried so CR nodes can drop
    its own channels from their answer. ``granted`` is set on a
    ServiceReply only (``None`` means blocked).
    """

    kind: MessageKind
    src: Endpoint
    dst: Endpoint
    timestamp: float
    request_id: int
    provider: int = -1
    payload: tuple[AvailabilityEntry, ...] = ()
    partial: bool = False
    granted: int | None = None

    def summary(self) -> str:
        parts = [f"req={self.request_id}"]
        if self.kind is MessageKind.SERVICE_REPLY:
            granted = self.granted
            parts.append("blocked" if granted is None else f"ch={granted}")
        elif self.payload:
            free = [e.channel_id for e in self.payload if e.available]
            parts.append("free=" + ",".join(str(c) for c in free))
        if self.partial:
            parts.append("partial")
        return " ".join(parts)
