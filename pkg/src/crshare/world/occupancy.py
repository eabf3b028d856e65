"""Ground-truth channel occupancy.

``OccupancyState`` is the only mutable part of the world. It keeps three
views consistent with each other:

- user counts per ``(cell, channel)``;
- per channel, the set of cells *holding* it (at least one user, or a
  borrowing lease);
- the set of leases ``(cell, channel)`` granted to borrowing cells.

A channel is admissible in a cell when the cell's count is below the
channel capacity and no interfering cell holds the channel. ``occupy``
and ``lease`` enforce that rule; a violation is a simulator bug and
raises :class:`~crshare.errors.InvariantFault`.
"""

from __future__ import annotations

import hashlib
from collections.abc import Collection, Iterable, Sequence

from ..errors import InvariantFault


class OccupancyState:
    """User counts, channel holders and leases for every cell and channel."""

    def __init__(
        self,
        n_cells: int,
        capacities: Sequence[int],
        interfering: Sequence[frozenset[int]],
    ) -> None:
        if len(interfering) != n_cells:
            raise ValueError("interfering must have one entry per cell")
        self._n_cells = n_cells
        self._capacity = tuple(capacities)
        self._interfering = tuple(interfering)
        self._counts = [[0] * len(self._capacity) for _ in range(n_cells)]
        self._holders: list[set[int]] = [set() for _ in self._capacity]
        self._leases: set[tuple[int, int]] = set()
        self._total_users = 0

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self._n_cells

    @property
    def n_channels(self) -> int:
        return len(self._capacity)

    @property
    def total_users(self) -> int:
        return self._total_users

    def capacity(self, channel: int) -> int:
        return self._capacity[channel]

    def count(self, cell: int, channel: int) -> int:
        return self._counts[cell][channel]

    def holders(self, channel: int) -> frozenset[int]:
        return frozenset(self._holders[channel])

    def has_lease(self, cell: int, channel: int) -> bool:
        return (cell, channel) in self._leases

    def leases_of(self, cell: int) -> list[int]:
        """Leased channels of *cell*, ascending."""
        return sorted(ch for c, ch in self._leases if c == cell)

    def is_admissible(self, cell: int, channel: int) -> bool:
        if self._counts[cell][channel] >= self._capacity[channel]:
            return False
        return self._holders[channel].isdisjoint(self._interfering[cell])

    def shadow(self, cells: Iterable[int]) -> frozenset[int]:
        """Union of the interference sets of *cells*."""
        out: set[int] = set()
        for c in cells:
            out.update(self._interfering[c])
        return frozenset(out)

    def free_for(
        self,
        cells: Collection[int],
        channel: int,
        shadow: frozenset[int] | None = None,
    ) -> bool:
        """True when *channel* is admissible in every one of *cells*.

        ``shadow`` must equal ``self.shadow(cells)`` when given; it turns
        the check into one set intersection.
        """
        holders = self._holders[channel]
        if not holders:
            return True
        if shadow is None:
            return all(self.is_admissible(c, channel) for c in cells)
        if not holders.isdisjoint(shadow):
            return False
        cap = self._capacity[channel]
        return all(
            self._counts[c][channel] < cap for c in holders.intersection(cells)
        )

    # ------------------------------------------------------------------
    # Mutations
    # ------------------------------------------------------------------

    def occupy(self, cell: int, channel: int) -> None:
        """Add one user of *channel* in *cell*."""
        if not self.is_admissible(cell, channel):
            raise InvariantFault(
                "occupy on a channel that is not admissible",
                self._describe(cell, channel),
            )
        self._counts[cell][channel] += 1
        self._holders[channel].add(cell)
        self._total_users += 1

    def release(self, cell: int, channel: int) -> None:
        """Remove one user of *channel* in *cell*."""
        if self._counts[cell][channel] <= 0:
            raise InvariantFault(
                "release on a channel with no users",
                self._describe(cell, channel),
            )
        self._counts[cell][channel] -= 1
        self._total_users -= 1
        idle = self._counts[cell][channel] == 0
        if idle and (cell, channel) not in self._leases:
            self._holders[channel].discard(cell)

    def lease(self, cell: int, channel: int) -> None:
        """Reserve a borrowed *channel* for *cell* until :meth:`unlease`."""
        if (cell, channel) in self._leases:
            raise InvariantFault(
                "channel already leased by this cell",
                self._describe(cell, channel),
            )
        if not self.is_admissible(cell, channel):
            raise InvariantFault(
                "lease on a channel that is not admissible",
                self._describe(cell, channel),
            )
        self._leases.add((cell, channel))
        self._holders[channel].add(cell)

    def unlease(self, cell: int, channel: int) -> None:
        """Give a borrowed channel back. Only legal once its calls ended."""
        if (cell, channel) not in self._leases:
            raise InvariantFault(
                "unlease without a lease", self._describe(cell, channel)
            )
        if self._counts[cell][channel] > 0:
            raise InvariantFault(
                "unlease would drop active calls", self._describe(cell, channel)
            )
        self._leases.discard((cell, channel))
        self._holders[channel].discard(cell)

    # ------------------------------------------------------------------
    # Integrity
    # ------------------------------------------------------------------

    def check_consistency(self) -> None:
        """Recompute every derived view from the counts and compare.

        Raises:
            InvariantFault: a count is out of range, a holder set or the
                user total disagrees with the counts, or two interfering
                cells hold the same channel.
        """
        total = 0
        for ch, cap in enumerate(self._capacity):
            expected: set[int] = set()
            for cell in range(self._n_cells):
                n = self._counts[cell][ch]
                if not 0 <= n <= cap:
                    raise InvariantFault(
                        "user count out of range", self._describe(cell, ch)
                    )
                total += n
                if n > 0 or (cell, ch) in self._leases:
                    expected.add(cell)
            if expected != self._holders[ch]:
                raise InvariantFault(
                    "holder index out of sync",
                    {"channel": ch, "holders": sorted(self._holders[ch])},
                )
            for cell in expected:
                clash = expected & self._interfering[cell]
                if clash:
                    raise InvariantFault(
                        "co-channel constraint violated",
                        {"channel": ch, "cell": cell, "clash": sorted(clash)},
                    )
        if total != self._total_users:
            raise InvariantFault(
                "user total out of sync",
                {"counted": total, "tracked": self._total_users},
            )

    def state_hash(self) -> str:
        """Digest of counts and leases; equal states hash equal."""
        digest = hashlib.sha256()
        for cell, row in enumerate(self._counts):
            for ch, n in enumerate(row):
                if n:
                    digest.update(f"{cell}:{ch}:{n};".encode())
        for cell, ch in sorted(self._leases):
            digest.update(f"L{cell}:{ch};".encode())
        return digest.hexdigest()

    def _describe(self, cell: int, channel: int) -> dict[str, object]:
        return {
            "cell": cell,
            "channel": channel,
            "count": self._counts[cell][channel],
            "capacity": self._capacity[channel],
            "holders": sorted(self._holders[channel]),
            "leased": (cell, channel) in self._leases,
        }
