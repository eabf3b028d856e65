"""Providers, channels, the hexagonal cell grid and ground-truth occupancy."""

from .models import Cell, Channel, CrNode, ServiceProvider
from .occupancy import OccupancyState
from .topology import Topology, build_topology
from .world import World

__all__ = [
    "Cell",
    "Channel",
    "CrNode",
    "OccupancyState",
    "ServiceProvider",
    "Topology",
    "World",
    "build_topology",
]
