"""Hexagonal site grid shared by all providers, and the CR overlay on it.

Geometry
--------
Sites are pointy-top hexagons in axial coordinates ``(q, r)`` with
circumradius ``R``; the centre of site ``(q, r)`` is::

    x = R * sqrt(3) * (q + r / 2)
    y = R * 1.5 * r

Sites are taken in spiral order (centre, then ring 1, ring 2, ...), so
seven sites form the usual flower. Every provider deploys one cell per
site: the grids are identical and co-located.

Vertex ``k`` of a hexagon lies at angle ``30 + 60 * k`` degrees and is
shared by the hexagon and its neighbours in directions ``k`` and
``k + 1``. That triple of axial coordinates is the vertex's exact
identity, so shared vertices are deduplicated without comparing floats.
A CR node sits on every distinct vertex; two nodes are linked when a hex
edge joins them.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from .models import Cell, CrNode, Hex, Point

# Neighbour directions ordered by the angle of the neighbour's centre:
# 0, 60, 120, 180, 240, 300 degrees.
_DIRECTIONS: tuple[Hex, ...] = (
    (1, 0),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (0, -1),
    (1, -1),
)
# Walk used to enumerate one ring, starting from ring_start(k).
_RING_WALK: tuple[Hex, ...] = (
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
)
_VERTEX_ANGLES = np.pi / 6 + np.pi / 3 * np.arange(6)
_RANGE_EPS = 1e-9


def _add(a: Hex, b: Hex, scale: int = 1) -> Hex:
    return (a[0] + scale * b[0], a[1] + scale * b[1])


def spiral_hexes() -> Iterator[Hex]:
    """Yield axial coordinates in spiral order, without end."""
    yield (0, 0)
    k = 1
    while True:
        current = (-k, k)
        for step in _RING_WALK:
            for _ in range(k):
                yield current
                current = _add(current, step)
        k += 1


def hex_center(h: Hex, radius: float) -> Point:
    q, r = h
    return (radius * math.sqrt(3.0) * (q + r / 2.0), radius * 1.5 * r)


@dataclass(frozen=True)
class Topology:
    """Cells of every provider, their adjacency, and the CR overlay.

    Cell ids are ``provider * cells_per_provider + site``.
    """

    n_providers: int
    cells_per_provider: int
    cell_radius: float
    sites: tuple[Hex, ...]
    cells: tuple[Cell, ...]
    cr_nodes: tuple[CrNode, ...]
    site_nodes: tuple[tuple[int, ...], ...]
    site_neighbors: tuple[tuple[int, ...], ...]
    node_cells: tuple[tuple[int, ...], ...]

    def cell_id(self, provider: int, site: int) -> int:
        return provider * self.cells_per_provider + site

    def cells_of(self, provider: int) -> tuple[int, ...]:
        start = provider * self.cells_per_provider
        return tuple(range(start, start + self.cells_per_provider))

    def adjacent_cells(self, cell: int) -> tuple[int, ...]:
        """Hex-neighbour cells in the same provider's grid."""
        c = self.cells[cell]
        return tuple(
            self.cell_id(c.provider, s) for s in self.site_neighbors[c.site]
        )

    def interfering_cells(self, cell: int) -> frozenset[int]:
        """Cells that must not hold a channel this cell transmits on.

        Co-located cells of the other providers plus every provider's
        cells on the neighbouring sites. Symmetric and irreflexive.
        """
        site = self.cells[cell].site
        sites = (site, *(self.cells[c].site for c in self.adjacent_cells(cell)))
        return frozenset(
            self.cell_id(p, s)
            for p in range(self.n_providers)
            for s in sites
            if self.cell_id(p, s) != cell
        )

    def cr_nodes_of(self, cell: int) -> tuple[int, ...]:
        """CR nodes on the six vertices of the cell, in vertex order."""
        return self.site_nodes[self.cells[cell].site]

    def cells_in_range(self, node: int) -> tuple[int, ...]:
        return self.node_cells[node]


def build_topology(
    n_providers: int,
    cells_per_provider: int,
    cell_radius: float,
    sensing_range: float | None = None,
) -> Topology:
    """Build the co-located hexagonal grids and their CR node overlay.

    Args:
        n_providers: Number of service providers (>= 1).
        cells_per_provider: Cells in each provider's grid (>= 1).
        cell_radius: Hexagon circumradius in metres (> 0).
        sensing_range: CR node sensing range in metres; defaults to
            ``cell_radius``.

    Returns:
        A deterministic :class:`Topology`: the same inputs always give the
        same ids, positions and links.

    Raises:
        ConfigurationError: counts below 1 or a non-positive radius/range.
    """
    if n_providers < 1:
        raise ConfigurationError("n_providers must be >= 1")
    if cells_per_provider < 1:
        raise ConfigurationError("cells_per_provider must be >= 1")
    if not cell_radius > 0:
        raise ConfigurationError("cell_radius must be > 0")
    if sensing_range is None:
        sensing_range = cell_radius
    if not sensing_range > 0:
        raise ConfigurationError("sensing_range must be > 0")

    spiral = spiral_hexes()
    sites = tuple(next(spiral) for _ in range(cells_per_provider))
    site_index = {h: i for i, h in enumerate(sites)}
    centers = [hex_center(h, cell_radius) for h in sites]

    site_neighbors = tuple(
        tuple(
            site_index[_add(h, d)]
            for d in _DIRECTIONS
            if _add(h, d) in site_index
        )
        for h in sites
    )

    # Deduplicate vertices by the axial triple of hexes that meet there.
    node_of_vertex: dict[tuple[Hex, ...], int] = {}
    positions: list[Point] = []
    site_nodes: list[tuple[int, ...]] = []
    for h, (cx, cy) in zip(sites, centers):
        xs = cx + cell_radius * np.cos(_VERTEX_ANGLES)
        ys = cy + cell_radius * np.sin(_VERTEX_ANGLES)
        ids: list[int] = []
        for k in range(6):
            ahead = _add(h, _DIRECTIONS[(k + 1) % 6])
            key = tuple(sorted((h, _add(h, _DIRECTIONS[k]), ahead)))
            node = node_of_vertex.get(key)
            if node is None:
                node = len(positions)
                node_of_vertex[key] = node
                positions.append((float(xs[k]), float(ys[k])))
            ids.append(node)
        site_nodes.append(tuple(ids))

    links: list[set[int]] = [set() for _ in positions]
    for ids in site_nodes:
        for k in range(6):
            a, b = ids[k], ids[(k + 1) % 6]
            links[a].add(b)
            links[b].add(a)

    cr_nodes = tuple(
        CrNode(
            id=i,
            position=positions[i],
            sensing_range=sensing_range,
            neighbors=tuple(sorted(links[i])),
        )
        for i in range(len(positions))
    )

    cells = tuple(
        Cell(
            id=p * cells_per_provider + s,
            provider=p,
            site=s,
            center=centers[s],
            radius=cell_radius,
        )
        for p in range(n_providers)
        for s in range(cells_per_provider)
    )

    def ids_at(site: int) -> list[int]:
        return [p * cells_per_provider + site for p in range(n_providers)]

    center_array = np.asarray(centers, dtype=float)
    reach = sensing_range + cell_radius * _RANGE_EPS
    node_cells: list[tuple[int, ...]] = []
    for node in cr_nodes:
        dist = np.hypot(
            center_array[:, 0] - node.position[0],
            center_array[:, 1] - node.position[1],
        )
        in_range = [int(s) for s in np.flatnonzero(dist <= reach)]
        node_cells.append(
            tuple(sorted(c for s in in_range for c in ids_at(s)))
        )

    return Topology(
        n_providers=n_providers,
        cells_per_provider=cells_per_provider,
        cell_radius=cell_radius,
        sites=sites,
        cells=cells,
        cr_nodes=cr_nodes,
        site_nodes=tuple(site_nodes),
        site_neighbors=site_neighbors,
        node_cells=tuple(node_cells),
    )
