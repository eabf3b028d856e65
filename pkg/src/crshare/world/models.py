"""Immutable domain models of the simulated geography.

All models are frozen dataclasses. The topology builder and the world
factory produce them; every other module only reads them.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigurationError

Point = tuple[float, float]
Hex = tuple[int, int]


@dataclass(frozen=True)
class ServiceProvider:
    """An operator with an exclusive pool of licensed channels.

    ``alpha`` is the unit price in currency per second per channel.
    """

    id: int
    licensed_channels: tuple[int, ...]
    alpha: float
    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ConfigurationError(
                f"provider {self.id}: alpha must be > 0, got {self.alpha}"
            )


@dataclass(frozen=True)
class Channel:
    """One licensed channel: a carrier shared by up to ``capacity`` users."""

    id: int
    owner: int
    center_freq_hz: float
    capacity: int = 10

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ConfigurationError(
                f"channel {self.id}: capacity must be >= 1"
            )
        if not self.center_freq_hz > 0:
            raise ConfigurationError(
                f"channel {self.id}: center_freq_hz must be > 0"
            )


@dataclass(frozen=True)
class Cell:
    """A provider's cell at one site of the shared hexagonal grid.

    Every site hosts one cell per provider; co-located cells share
    ``center`` and ``radius``. One base station serves each cell.
    """

    id: int
    provider: int
    site: int
    center: Point
    radius: float


@dataclass(frozen=True)
class CrNode:
    """A fixed cognitive-radio sensing node on a cell vertex."""

    id: int
    position: Point
    sensing_range: float
    neighbors: tuple[int, ...]
