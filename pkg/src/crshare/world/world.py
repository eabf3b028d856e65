"""The simulated world: providers, their channels, cells and occupancy."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from ..config import Scenario
from .models import Channel, ServiceProvider
from .occupancy import OccupancyState
from .topology import Topology, build_topology


@dataclass
class World:
    """Static geography plus the mutable ground-truth occupancy.

    Channel ids are global and contiguous per provider: provider 0 owns
    the first block, provider 1 the next, and so on. Channel ``g`` is
    centred at ``base_freq_hz + g * spacing_hz``.
    """

    topology: Topology
    providers: tuple[ServiceProvider, ...]
    channels: tuple[Channel, ...]
    occupancy: OccupancyState
    spacing_hz: float

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> World:
        n = scenario.topology.n_providers
        topology = build_topology(
            n,
            scenario.topology.cells_per_provider,
            scenario.topology.cell_radius_m,
            scenario.topology.effective_sensing_range_m,
        )
        counts = scenario.channels.counts(n)
        prices = scenario.channels.prices(n)
        cfg = scenario.channels

        channels: list[Channel] = []
        providers: list[ServiceProvider] = []
        for p in range(n):
            owned: list[int] = []
            for _ in range(counts[p]):
                g = len(channels)
                channels.append(
                    Channel(
                        id=g,
                        owner=p,
                        center_freq_hz=cfg.base_freq_hz + g * cfg.spacing_hz,
                        capacity=cfg.capacity,
                    )
                )
                owned.append(g)
            providers.append(
                ServiceProvider(
                    id=p,
                    licensed_channels=tuple(owned),
                    alpha=prices[p],
                    cells=topology.cells_of(p),
                )
            )

        occupancy = OccupancyState(
            n_cells=len(topology.cells),
            capacities=[c.capacity for c in channels],
            interfering=[
                topology.interfering_cells(c.id) for c in topology.cells
            ],
        )
        return cls(
            topology=topology,
            providers=tuple(providers),
            channels=tuple(channels),
            occupancy=occupancy,
            spacing_hz=cfg.spacing_hz,
        )

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    def owner_of(self, channel: int) -> int:
        return self.channels[channel].owner

    def owned_channels(self, provider: int) -> tuple[int, ...]:
        return self.providers[provider].licensed_channels

    def provider_of(self, cell: int) -> int:
        return self.topology.cells[cell].provider

    def foreign_channels(self, provider: int) -> tuple[int, ...]:
        return tuple(c.id for c in self.channels if c.owner != provider)

    def first_admissible(
        self, cell: int, channels: Sequence[int]
    ) -> int | None:
        """Lowest-id admissible channel of *channels* in *cell*, or None."""
        occ = self.occupancy
        for ch in sorted(channels):
            if occ.is_admissible(cell, ch):
                return ch
        return None

    def occupy(self, cell: int, channel: int) -> None:
        self.occupancy.occupy(cell, channel)

    def release(self, cell: int, channel: int) -> None:
        self.occupancy.release(cell, channel)
