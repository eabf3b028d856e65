"""Tests for crshare.sbac: channel scoring and selection."""

from __future__ import annotations

import math
import random

import pytest

from crshare.config import SbacConfig
from crshare.errors import ConfigurationError
from crshare.sbac import (
    ChannelCandidate,
    CostParams,
    SbacWeights,
    ScoredCandidate,
    availability_prob,
    channel_cost,
    channel_utility,
    freq_spread,
    score_candidates,
    select_best,
)

MHZ = 1e6


def _exhaustive_argmax(scored: list[ScoredCandidate]) -> int | None:
    if not scored:
        return None
    top = max(s.utility for s in scored)
    return min(s.channel_id for s in scored if s.utility == top)


class TestAvailabilityProb:
    @pytest.mark.parametrize(
        ("available", "total", "expected"),
        [(5, 10, 0.5), (0, 10, 0.0), (10, 10, 1.0)],
    )
    def test_ratio(self, available: int, total: int, expected: float) -> None:
        assert availability_prob(available, total) == expected

    def test_zero_total_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            availability_prob(0, 0)

    def test_available_above_total_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            availability_prob(11, 10)


class TestFreqSpread:
    def test_max_minus_min(self) -> None:
        spread = freq_spread([900.0 * MHZ, 900.4 * MHZ, 900.2 * MHZ])
        assert spread == pytest.approx(400e3)

    def test_singleton_is_floored(self) -> None:
        assert freq_spread([900.0 * MHZ]) == 200e3
        assert freq_spread([900.0 * MHZ], inter_floor=25e3) == 25e3

    def test_order_invariant(self) -> None:
        freqs = [901.0 * MHZ, 900.0 * MHZ, 903.2 * MHZ, 902.6 * MHZ]
        rng = random.Random(0)
        expected = freq_spread(freqs)
        for _ in range(10):
            rng.shuffle(freqs)
            assert freq_spread(freqs) == expected

    def test_empty_rejected(self) -> None:
        with pytest.raises(ValueError):
            freq_spread([])


class TestCost:
    def test_examples(self) -> None:
        cost = channel_cost(CostParams(t_call=3.0, c=0.01))
        assert cost == pytest.approx(1.8)
        assert channel_cost(CostParams(t_call=1.0, c=1.0)) == 60.0

    def test_bilinear(self) -> None:
        base = channel_cost(CostParams(2.0, 0.5))
        assert channel_cost(CostParams(4.0, 0.5)) == pytest.approx(2 * base)
        assert channel_cost(CostParams(2.0, 1.5)) == pytest.approx(3 * base)

    def test_non_positive_params_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            CostParams(0.0, 0.01)
        with pytest.raises(ConfigurationError):
            CostParams(3.0, 0.0)


class TestUtility:
    def test_probability_term(self) -> None:
        w = SbacWeights(1.0, 0.0, 0.0)
        assert channel_utility(0.5, 200e3, 1.8, w) == pytest.approx(5.0)

    def test_cost_term(self) -> None:
        w = SbacWeights(0.0, 0.0, 1.0)
        u = channel_utility(0.5, 200e3, 1.8, w)
        assert u == pytest.approx(0.5556, abs=1e-4)

    def test_spread_term_is_zero_at_one_spacing(self) -> None:
        w = SbacWeights(0.0, 1.0, 0.0)
        assert channel_utility(0.5, 200e3, 1.8, w) == 0.0

    def test_all_terms(self) -> None:
        w = SbacWeights(1.0, 1.0, 1.0)
        u = channel_utility(0.5, 400e3, 1.8, w)
        assert u == pytest.approx(5.0 - math.log(2.0) + 1.0 / 1.8)
        assert u == pytest.approx(4.8624, abs=1e-4)

    def test_monotone_in_prob_and_cost(self) -> None:
        w = SbacWeights(1.0, 1.0, 1.0)
        base = channel_utility(0.5, 200e3, 1.8, w)
        assert channel_utility(0.6, 200e3, 1.8, w) > base
        assert channel_utility(0.5, 200e3, 2.0, w) < base
        assert channel_utility(0.5, 800e3, 1.8, w) < channel_utility(
            0.5, 400e3, 1.8, w
        )


class TestWeights:
    def test_negative_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            SbacWeights(-1.0, 1.0, 1.0)

    def test_all_zero_rejected(self) -> None:
        with pytest.raises(ConfigurationError):
            SbacWeights(0.0, 0.0, 0.0)

    def test_from_config(self) -> None:
        w = SbacWeights.from_config(SbacConfig(beta1=2.0, beta2=0.5, beta3=0.0))
        assert (w.beta1, w.beta2, w.beta3) == (2.0, 0.5, 0.0)


class TestSelection:
    def test_empty_gives_none(self) -> None:
        assert select_best([]) is None

    def test_tie_goes_to_lowest_id(self) -> None:
        scored = [ScoredCandidate(7, 4.8), ScoredCandidate(2, 4.8)]
        assert select_best(scored) == 2

    def test_unavailable_candidates_are_dropped(self) -> None:
        w = SbacWeights()
        cands = [
            ChannelCandidate(1, 900.0 * MHZ, 0.9, 1.8, available_now=False),
            ChannelCandidate(2, 900.2 * MHZ, 0.1, 1.8),
        ]
        scored = score_candidates(cands, w)
        assert [s.channel_id for s in scored] == [2]
        assert score_candidates(cands[:1], w) == []

    def test_shared_spread_across_candidates(self) -> None:
        w = SbacWeights(0.0, 1.0, 0.0)
        cands = [
            ChannelCandidate(1, 900.0 * MHZ, 0.5, 1.8),
            ChannelCandidate(2, 900.8 * MHZ, 0.5, 1.8),
        ]
        scored = score_candidates(cands, w)
        expected = pytest.approx(-math.log(4.0))
        assert scored[0].utility == scored[1].utility == expected

    def test_cheaper_channel_wins_when_prob_ties(self) -> None:
        w = SbacWeights()
        cands = [
            ChannelCandidate(3, 900.0 * MHZ, 0.5, 1.8),
            ChannelCandidate(8, 900.2 * MHZ, 0.5, 0.9),
        ]
        assert select_best(score_candidates(cands, w)) == 8

    def test_invalid_candidate_rejected(self) -> None:
        with pytest.raises(ValueError):
            ChannelCandidate(1, 900.0 * MHZ, 1.5, 1.8)
        with pytest.raises(ValueError):
            ChannelCandidate(1, 900.0 * MHZ, 0.5, 0.0)

    def test_agrees_with_exhaustive_scan(self) -> None:
        rng = random.Random(2024)
        w = SbacWeights(1.0, 1.0, 1.0)
        for _ in range(10_000):
            size = rng.randint(0, 20)
            ids = rng.sample(range(100), size)
            # Coarse grids on prob and cost engineer frequent exact ties.
            cands = [
                ChannelCandidate(
                    channel_id=ch,
                    ch_freq=900.0 * MHZ + ch * 200e3,
                    prob=rng.choice((0.0, 0.25, 0.5, 1.0)),
                    cost=rng.choice((0.9, 1.8)),
                )
                for ch in ids
            ]
            scored = score_candidates(cands, w)
            best = select_best(scored)
            assert best == _exhaustive_argmax(scored)

    def test_permutation_invariant(self) -> None:
        rng = random.Random(9)
        scored = [
            ScoredCandidate(ch, rng.choice((1.0, 2.0, 3.0))) for ch in range(15)
        ]
        expected = select_best(scored)
        for _ in range(20):
            rng.shuffle(scored)
            assert select_best(scored) == expected

    def test_uniform_weight_scaling_keeps_choice(self) -> None:
        rng = random.Random(31)
        for _ in range(200):
            cands = [
                ChannelCandidate(
                    ch,
                    900.0 * MHZ + ch * 200e3,
                    rng.random(),
                    rng.uniform(0.5, 3.0),
                )
                for ch in rng.sample(range(50), rng.randint(1, 12))
            ]
            w = SbacWeights(rng.random(), rng.random(), rng.random() + 0.1)
            base = select_best(score_candidates(cands, w))
            tripled = SbacWeights(3 * w.beta1, 3 * w.beta2, 3 * w.beta3)
            assert select_best(score_candidates(cands, tripled)) == base
