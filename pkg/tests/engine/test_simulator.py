# pyright: reportPrivateUsage=false
"""Tests for crshare.engine.simulator: one run and its invariants."""

from __future__ import annotations

from collections.abc import Callable

import pytest

from crshare.config import Scenario
from crshare.engine import RunResult, Simulation, render_csv, report_rows, run
from crshare.errors import InvariantFault
from crshare.observability import MemoryTracer
from crshare.traffic import Call

ScenarioFactory = Callable[..., Scenario]


def _csv(name: str, seed: int, result: RunResult) -> str:
    return render_csv(report_rows(result.report, name, seed))


class TestDeterminism:
    def test_same_seed_byte_identical(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario()
        a = run(sc)
        b = run(sc)
        assert _csv(sc.name, sc.seed, a) == _csv(sc.name, sc.seed, b)
        assert a.final_state_hash == b.final_state_hash
        assert a.events_processed == b.events_processed

    def test_same_seed_identical_trace(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(traffic={"mean_rates": (0.08, 0.08)})
        ta, tb = MemoryTracer(), MemoryTracer()
        run(sc, tracer=ta)
        run(sc, tracer=tb)
        assert ta.events and ta.events == tb.events

    def test_different_seeds_differ(
        self, make_scenario: ScenarioFactory
    ) -> None:
        a = run(make_scenario(seed=1))
        b = run(make_scenario(seed=2))
        assert _csv("x", 0, a) != _csv("x", 0, b)


class TestInvariants:
    def test_conservation_with_full_audit(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(traffic={"mean_rates": (0.1, 0.03)})
        result = run(sc, audit=True)
        c = result.counters
        for p in range(2):
            settled = c.blocked[p] + c.completed[p] + c.active[p] + c.waiting[p]
            assert c.arrivals[p] == settled
        assert sum(c.arrivals) > 0

    def test_blocking_rate_matches_decision_log(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(traffic={"mean_rates": (0.1, 0.1)})
        result = run(sc, keep_logs=True)
        log = result.decisions
        assert log
        blocked = sum(1 for d in log if d.blocked)
        assert result.report.r_bl == blocked / len(log)
        for m in result.report.providers:
            mine = [d for d in log if d.provider == m.provider]
            assert m.n_processed == len(mine)
            assert m.n_blocked == sum(1 for d in mine if d.blocked)

    def test_revenue_identity(self, make_scenario: ScenarioFactory) -> None:
        sc = make_scenario(channels={"alpha": (0.01, 0.02)})
        result = run(sc)
        for m, alpha in zip(result.report.providers, (0.01, 0.02)):
            assert m.eta_s is not None and m.c_e is not None
            assert m.c_e == alpha * result.report.t_obs * m.eta_s

    def test_efficiency_matches_offline_integration(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(traffic={"mean_rates": (0.08, 0.02)})
        result = run(sc, keep_logs=True)
        t0, t1 = sc.warmup_s, sc.t_obs_s
        for m in result.report.providers:
            assert m.provider is not None and m.eta_s is not None
            level, last, area = 0, 0.0, 0.0
            for s in (s for s in result.busy_trace if s.provider == m.provider):
                lo, hi = max(last, t0), min(s.time, t1)
                if hi > lo:
                    area += level * (hi - lo)
                level, last = s.n_busy, s.time
            lo = max(last, t0)
            if t1 > lo:
                area += level * (t1 - lo)
            expected = area / (m.owned_channels * (t1 - t0))
            assert m.eta_s == pytest.approx(expected, rel=1e-9)

    def test_invariant_fault_carries_state(
        self, make_scenario: ScenarioFactory, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        sim = Simulation(make_scenario(sharing_enabled=False))

        def broken(now: float, *_: object) -> None:
            raise InvariantFault("boom", {"detail": 1})

        monkeypatch.setattr(sim, "_on_rate_redraw", broken)
        with pytest.raises(InvariantFault) as exc_info:
            sim.run()
        state = exc_info.value.state
        assert state["detail"] == 1
        assert state["event"] == "RATE_REDRAW"
        assert state["time"] == 0.0
        assert "arrivals" in state


class TestEdgeCases:
    def test_very_light_load_never_blocks(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(
            t_obs_s=36_000.0, traffic={"mean_rates": (1e-3, 1e-3)}
        )
        result = run(sc)
        assert result.report.total.n_processed > 0
        assert result.report.r_bl == 0.0

    def test_no_channels_blocks_everything(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(
            sharing_enabled=False,
            topology={"n_providers": 1},
            channels={"channels_per_provider": 0},
            traffic={"mean_rates": (0.1,)},
        )
        result = run(sc)
        assert result.report.total.n_processed > 0
        assert result.report.r_bl == 1.0
        assert result.report.eta_s is None
        assert result.report.providers[0].c_e is None

    def test_provider_without_channels_borrows(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(
            channels={"channels_per_provider": (0, 3)},
            traffic={"mean_rates": (0.01, 0.01)},
        )
        result = run(sc)
        p0 = result.report.providers[0]
        assert p0.eta_s is None
        assert p0.r_bl is not None and p0.r_bl < 1.0
        assert result.protocol["grants"] > 0
        assert result.protocol["releases"] > 0

    def test_queue_drained_at_end(self, make_scenario: ScenarioFactory) -> None:
        result = run(make_scenario())
        # Departures of calls still in service are dropped at EndOfRun.
        assert result.events_dropped >= sum(result.counters.active)


class TestSharingOff:
    def test_no_overlay_and_no_messages(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(
            sharing_enabled=False, traffic={"mean_rates": (0.2, 0.2)}
        )
        sim = Simulation(sc, tracer=MemoryTracer())
        assert sim.cr_nodes == [] and sim.stations == []
        tracer = MemoryTracer()
        result = run(sc, tracer=tracer)
        assert tracer.events == []
        assert result.protocol == {}
        assert sum(result.counters.waiting) == 0

    def test_providers_isolated(self, make_scenario: ScenarioFactory) -> None:
        # Provider 1 is idle; provider 0 must not profit from its spectrum.
        sc = make_scenario(
            sharing_enabled=False, traffic={"mean_rates": (0.3, 1e-6)}
        )
        result = run(sc, audit=True)
        p0, p1 = result.report.providers
        assert p1.eta_s == 0.0
        assert p0.r_bl is not None and p0.r_bl > 0.3

    def test_foreign_admission_is_a_fault(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sim = Simulation(make_scenario(sharing_enabled=False))
        with pytest.raises(InvariantFault):
            sim.admit(Call(0, 0, 0, 0.0, 10.0), channel=3, now=0.0)


class TestProtocolBounds:
    def test_requests_and_responses_per_episode(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(
            topology={"n_providers": 3},
            channels={"channels_per_provider": 2, "capacity": 3},
            traffic={"mean_rates": (0.1, 0.02, 0.02)},
            t_obs_s=3000.0,
        )
        tracer = MemoryTracer()
        run(sc, tracer=tracer)
        proto = sc.protocol
        bound = proto.reply_timeout_s + 2 * proto.message_latency_s
        episodes = 0
        for request_id, events in tracer.by_request().items():
            if request_id < 0:
                continue
            requests = [e for e in events if e.kind == "ChannelRequest"]
            responses = [e for e in events if e.kind == "AvailabilityResponse"]
            if not requests:
                continue
            start = requests[0].time
            if start > sc.t_obs_s - 1.0:
                continue  # cut off by the end of the run
            episodes += 1
            assert len(requests) <= 6
            assert all(r.time == start for r in requests)
            polled = sorted(r.dst for r in requests)
            assert sorted(r.src for r in responses) == polled
            for resp in responses:
                received = resp.time + proto.message_latency_s
                assert received - start <= bound + 1e-9
        assert episodes > 0

    def test_one_hexagon_polls_two_neighbours_per_node(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sc = make_scenario(traffic={"mean_rates": (0.15, 0.01)}, t_obs_s=1500.0)
        tracer = MemoryTracer()
        run(sc, tracer=tracer)
        for request_id, events in tracer.by_request().items():
            if request_id < 0:
                continue
            n_requests = sum(1 for e in events if e.kind == "ChannelRequest")
            n_broadcasts = sum(
                1 for e in events if e.kind == "NeighborBroadcast"
            )
            assert n_broadcasts <= 2 * n_requests


class TestRateEpochs:
    def test_rates_redrawn_once_per_epoch(
        self, make_scenario: ScenarioFactory, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        sim = Simulation(
            make_scenario(traffic={"epoch_length_s": 300.0}, t_obs_s=1000.0)
        )
        times: list[float] = []
        redraw = sim._on_rate_redraw

        def recording(now: float) -> None:
            times.append(now)
            redraw(now)

        monkeypatch.setattr(sim, "_on_rate_redraw", recording)
        sim.run()
        assert times == [0.0, 300.0, 600.0, 900.0]

    def test_arrivals_from_an_old_epoch_are_dropped(
        self, make_scenario: ScenarioFactory, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        sim = Simulation(
            make_scenario(traffic={"epoch_length_s": 50.0}, t_obs_s=2000.0)
        )
        seen: list[tuple[bool, int]] = []
        arrive = sim._on_arrival

        def recording(now: float, provider: int, generation: int) -> None:
            stale = generation != sim._generation[provider]
            before = sim._arrivals[provider]
            arrive(now, provider, generation)
            seen.append((stale, sim._arrivals[provider] - before))

        monkeypatch.setattr(sim, "_on_arrival", recording)
        sim.run()
        assert any(stale for stale, _ in seen)
        assert all(counted == 0 for stale, counted in seen if stale)
        assert all(counted == 1 for stale, counted in seen if not stale)


class TestWaitingLine:
    """One owned channel per provider; provider 0 lives in cell 0."""

    def _sim_with_waiting_call(
        self, make_scenario: ScenarioFactory
    ) -> Simulation:
        sim = Simulation(
            make_scenario(channels={"channels_per_provider": 1, "capacity": 1})
        )
        sim._on_arrival(0.0, 0, 0)  # call 0 takes channel 0
        sim._on_arrival(1.0, 0, 0)  # call 1 finds the cell full and waits
        assert sim._queued == {1}
        assert sim.stations[0].waiting == 1
        return sim

    def test_departure_hands_channel_to_waiting_call(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sim = self._sim_with_waiting_call(make_scenario)
        sim._on_departure(5.0, Call(0, 0, 0, 0.0, 5.0), 0)
        assert sim._queued == set()
        assert sim.stations[0].waiting == 0
        assert sim._active[0] == 1
        assert sim.world.occupancy.total_users == 1

    def test_new_arrival_queues_behind_waiting_call(
        self, make_scenario: ScenarioFactory
    ) -> None:
        sim = self._sim_with_waiting_call(make_scenario)
        # A slot opens without a departure event in this cell.
        sim.world.release(0, 0)
        sim._on_arrival(2.0, 0, 0)
        # Call 1 got the slot; call 2 is the one left waiting. Call 0 is
        # still counted in service.
        assert sim._queued == {2}
        assert sim._active[0] == 2
        assert sim._waiting[0] == 1
