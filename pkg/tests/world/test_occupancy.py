# pyright: reportPrivateUsage=false
"""Tests for crshare.world.occupancy.OccupancyState."""

from __future__ import annotations

import numpy as np
import pytest

from crshare.errors import InvariantFault
from crshare.world import OccupancyState, build_topology


@pytest.fixture
def occ() -> OccupancyState:
    # Cells 0 and 1 interfere; cell 2 is isolated. Two channels, capacity 2.
    return OccupancyState(
        n_cells=3,
        capacities=[2, 2],
        interfering=[frozenset({1}), frozenset({0}), frozenset()],
    )


def _flower_state() -> tuple[OccupancyState, int]:
    topo = build_topology(3, 7, 500.0)
    n_channels = 6
    state = OccupancyState(
        n_cells=len(topo.cells),
        capacities=[3] * n_channels,
        interfering=[topo.interfering_cells(c.id) for c in topo.cells],
    )
    return state, n_channels


# --- occupy / release ---


def test_occupy_on_empty_state(occ: OccupancyState) -> None:
    occ.occupy(0, 1)
    assert occ.count(0, 1) == 1
    assert occ.holders(1) == frozenset({0})
    assert occ.total_users == 1


def test_occupy_then_release_restores_state(occ: OccupancyState) -> None:
    before = occ.state_hash()
    occ.occupy(2, 0)
    assert occ.state_hash() != before
    occ.release(2, 0)
    assert occ.state_hash() == before
    assert occ.holders(0) == frozenset()
    assert occ.total_users == 0


def test_occupy_at_capacity_faults(occ: OccupancyState) -> None:
    occ.occupy(0, 0)
    occ.occupy(0, 0)
    assert not occ.is_admissible(0, 0)
    with pytest.raises(InvariantFault) as exc_info:
        occ.occupy(0, 0)
    assert exc_info.value.state["count"] == 2
    assert exc_info.value.state["capacity"] == 2


def test_release_without_users_faults(occ: OccupancyState) -> None:
    with pytest.raises(InvariantFault):
        occ.release(0, 0)


def test_interfering_holder_blocks_admission(occ: OccupancyState) -> None:
    occ.occupy(0, 0)
    assert not occ.is_admissible(1, 0)
    assert occ.is_admissible(1, 1)
    assert occ.is_admissible(2, 0)
    with pytest.raises(InvariantFault):
        occ.occupy(1, 0)


def test_same_cell_can_stack_users(occ: OccupancyState) -> None:
    occ.occupy(0, 0)
    assert occ.is_admissible(0, 0)


# --- leases ---


def test_lease_reserves_channel_without_users(occ: OccupancyState) -> None:
    occ.lease(1, 1)
    assert occ.has_lease(1, 1)
    assert occ.count(1, 1) == 0
    assert not occ.is_admissible(0, 1)
    assert occ.leases_of(1) == [1]


def test_release_keeps_leased_holder(occ: OccupancyState) -> None:
    occ.lease(2, 0)
    occ.occupy(2, 0)
    occ.release(2, 0)
    assert occ.holders(0) == frozenset({2})


def test_unlease_with_active_calls_faults(occ: OccupancyState) -> None:
    occ.lease(2, 1)
    occ.occupy(2, 1)
    with pytest.raises(InvariantFault):
        occ.unlease(2, 1)


def test_unlease_frees_channel(occ: OccupancyState) -> None:
    occ.lease(0, 1)
    occ.unlease(0, 1)
    assert not occ.has_lease(0, 1)
    assert occ.is_admissible(1, 1)


def test_double_lease_faults(occ: OccupancyState) -> None:
    occ.lease(2, 0)
    with pytest.raises(InvariantFault):
        occ.lease(2, 0)


def test_lease_of_interfered_channel_faults(occ: OccupancyState) -> None:
    occ.occupy(0, 1)
    with pytest.raises(InvariantFault):
        occ.lease(1, 1)


def test_unlease_without_lease_faults(occ: OccupancyState) -> None:
    with pytest.raises(InvariantFault):
        occ.unlease(0, 0)


# --- hashing and consistency ---


def test_hash_ignores_operation_order() -> None:
    a, _ = _flower_state()
    b, _ = _flower_state()
    a.occupy(0, 1)
    a.occupy(20, 2)
    a.lease(5, 4)
    b.lease(5, 4)
    b.occupy(20, 2)
    b.occupy(0, 1)
    assert a.state_hash() == b.state_hash()


def test_random_walk_stays_consistent() -> None:
    state, n_channels = _flower_state()
    rng = np.random.default_rng(3)
    held: list[tuple[int, int]] = []
    for _ in range(2000):
        if held and rng.random() < 0.4:
            cell, ch = held.pop(int(rng.integers(len(held))))
            state.release(cell, ch)
        else:
            cell = int(rng.integers(state.n_cells))
            ch = int(rng.integers(n_channels))
            if state.is_admissible(cell, ch):
                state.occupy(cell, ch)
                held.append((cell, ch))
    state.check_consistency()
    assert state.total_users == len(held)


def test_free_for_matches_brute_force() -> None:
    topo = build_topology(3, 7, 500.0)
    state, n_channels = _flower_state()
    rng = np.random.default_rng(8)
    for _ in range(300):
        cell = int(rng.integers(state.n_cells))
        ch = int(rng.integers(n_channels))
        if state.is_admissible(cell, ch):
            state.occupy(cell, ch)
    for node in topo.cr_nodes:
        cells = topo.cells_in_range(node.id)
        shadow = state.shadow(cells)
        for ch in range(n_channels):
            expected = all(state.is_admissible(c, ch) for c in cells)
            assert state.free_for(cells, ch, shadow) is expected
            assert state.free_for(cells, ch) is expected


def test_check_consistency_detects_clash() -> None:
    state = OccupancyState(
        n_cells=2, capacities=[1], interfering=[frozenset({1}), frozenset({0})]
    )
    state.occupy(0, 0)
    # Corrupt the holder index behind the public API.
    state._holders[0].add(1)
    with pytest.raises(InvariantFault):
        state.check_consistency()


def test_mismatched_interference_table_rejected() -> None:
    with pytest.raises(ValueError):
        OccupancyState(n_cells=2, capacities=[1], interfering=[frozenset()])
