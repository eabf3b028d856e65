"""The spectrum management network: CR nodes, base stations, messages."""

from .base_station import AdmissionContext, BaseStation, BsPhase, SbacSettings
from .cr_node import CrNode, merge_availability
from .messages import AvailabilityEntry, Endpoint, Message, MessageKind
from .network import Network, TimerTarget

__all__ = [
    "AdmissionContext",
    "AvailabilityEntry",
    "BaseStation",
    "BsPhase",
    "CrNode",
    "Endpoint",
    "Message",
    "MessageKind",
    "Network",
    "SbacSettings",
    "TimerTarget",
    "merge_availability",
]
