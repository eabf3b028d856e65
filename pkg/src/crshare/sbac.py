"""Selection of Best Available Channel (SBAC).

A borrowing base station scores every candidate channel with::

    ch_u = 10 * beta1 * prob + beta2 * ln(1 / inter_norm) + beta3 / cost

and grants the highest score, lowest channel id first on ties.

- ``prob`` is the availability probability of the candidate.
- ``inter`` is the frequency spread of the whole candidate list (one
  value shared by every candidate), floored at one channel spacing and
  expressed in channel spacings as ``inter_norm``.
- ``cost`` is ``t_call * 60 * c``: expected call minutes times the unit
  price per second.

Everything here is pure and stateless.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .config import SbacConfig
from .errors import ConfigurationError

DEFAULT_INTER_UNIT_HZ = 200e3


@dataclass(frozen=True)
class ChannelCandidate:
    channel_id: int
    ch_freq: float
    prob: float
    cost: float
    available_now: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"prob must lie in [0, 1], got {self.prob}")
        if not self.cost > 0:
            raise ValueError(f"cost must be > 0, got {self.cost}")


@dataclass(frozen=True)
class SbacWeights:
    beta1: float = 1.0
    beta2: float = 1.0
    beta3: float = 1.0

    def __post_init__(self) -> None:
        betas = (self.beta1, self.beta2, self.beta3)
        if any(b < 0 for b in betas):
            raise ConfigurationError("SBAC weights must be >= 0")
        if not any(b > 0 for b in betas):
            raise ConfigurationError("SBAC weights must not all be zero")

    @classmethod
    def from_config(cls, cfg: SbacConfig) -> SbacWeights:
        return cls(cfg.beta1, cfg.beta2, cfg.beta3)


@dataclass(frozen=True)
class CostParams:
    """``t_call`` in minutes, ``c`` in currency per second."""

    t_call: float
    c: float

    def __post_init__(self) -> None:
        if not self.t_call > 0:
            raise ConfigurationError("t_call must be > 0")
        if not self.c > 0:
            raise ConfigurationError("c must be > 0")


@dataclass(frozen=True)
class ScoredCandidate:
    channel_id: int
    utility: float


def availability_prob(available_count: int, total_count: int) -> float:
    """Fraction of channels currently available.

    Raises:
        ConfigurationError: ``total_count`` < 1, or ``available_count``
            outside ``[0, total_count]``.
    """
    if total_count < 1:
        raise ConfigurationError("total_count must be >= 1")
    if not 0 <= available_count <= total_count:
        raise ConfigurationError(
            f"available_count must lie in [0, {total_count}], "
            f"got {available_count}"
        )
    return available_count / total_count


def freq_spread(
    freqs: Iterable[float], inter_floor: float = DEFAULT_INTER_UNIT_HZ
) -> float:
    """``max - min`` of *freqs* in Hz, never below *inter_floor*.

    Raises:
        ValueError: *freqs* is empty.
    """
    values = list(freqs)
    if not values:
        raise ValueError("freq_spread needs at least one frequency")
    return max(max(values) - min(values), inter_floor)


def channel_cost(params: CostParams) -> float:
    return params.t_call * 60.0 * params.c


def channel_utility(
    prob: float,
    inter: float,
    cost: float,
    w: SbacWeights,
    inter_unit: float = DEFAULT_INTER_UNIT_HZ,
) -> float:
    inter_norm = inter / inter_unit
    return (
        10.0 * w.beta1 * prob
        + w.beta2 * math.log(1.0 / inter_norm)
        + w.beta3 / cost
    )


def score_candidates(
    candidates: Sequence[ChannelCandidate],
    w: SbacWeights,
    inter_unit: float = DEFAULT_INTER_UNIT_HZ,
) -> list[ScoredCandidate]:
    """Score the currently available candidates.

    ``inter`` is computed once over the scored list. Candidates with
    ``available_now=False`` are dropped first.
    """
    live = [c for c in candidates if c.available_now]
    if not live:
        return []
    inter = freq_spread((c.ch_freq for c in live), inter_floor=inter_unit)
    return [
        ScoredCandidate(
            c.channel_id, channel_utility(c.prob, inter, c.cost, w, inter_unit)
        )
        for c in live
    ]


def select_best(scored: Iterable[ScoredCandidate]) -> int | None:
    """Id of the highest-utility candidate, lowest id on ties; None if empty."""
    best: ScoredCandidate | None = None
    for s in scored:
        if (
            best is None
            or s.utility > best.utility
            or (s.utility == best.utility and s.channel_id < best.channel_id)
        ):
            best = s
    return None if best is None else best.channel_id
