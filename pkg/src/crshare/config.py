"""Scenario configuration models and the JSON scenario loader.

Every config object is a frozen dataclass validated in ``__post_init__``,
so an invalid scenario fails at construction time, before a single event
is scheduled. Sequences are normalised to tuples to keep scenarios
hashable and safe to share between replications.

JSON layout
-----------
A scenario document mirrors :class:`Scenario`, with one nested object per
sub-config::

    {
      "name": "hot-provider",
      "seed": 7,
      "t_obs_s": 7200,
      "sharing_enabled": true,
      "topology": {"n_providers": 5, "cells_per_provider": 1},
      "channels": {"channels_per_provider": 5, "capacity": 10},
      "traffic": {"mean_rates": [0.17, 0.17, 0.17, 0.17, 0.33]},
      "sbac": {"beta1": 1.0, "beta2": 1.0, "beta3": 1.0},
      "protocol": {"sensing_period_s": 1.0}
    }

Unknown keys at any level are rejected. ``seed`` is mandatory, either in
the document or as an override.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Literal

from .errors import ConfigurationError

ProbMode = Literal["global", "history"]


def _is_count(value: object) -> bool:
    """True for a plain ``int``; ``bool`` and integral floats do not count."""
    return isinstance(value, int) and not isinstance(value, bool)


def _require_count(value: object, name: str, minimum: int) -> None:
    if not _is_count(value):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:  # type: ignore[operator]
        raise ConfigurationError(f"{name} must be >= {minimum}")


def _as_tuple(
    value: float | Sequence[float], n: int, name: str
) -> tuple[float, ...]:
    """Broadcast a scalar, or check a per-provider sequence, to length *n*."""
    if isinstance(value, (int, float)):
        return (float(value),) * n
    values = tuple(float(v) for v in value)
    if len(values) != n:
        raise ConfigurationError(
            f"{name} has {len(values)} entries, expected one per provider ({n})"
        )
    return values


@dataclass(frozen=True)
class TopologyConfig:
    """Geometry of the co-located provider grids.

    ``sensing_range_m=None`` means one cell radius, so a CR node on a
    vertex covers exactly the cells that share that vertex.
    """

    n_providers: int = 5
    cells_per_provider: int = 1
    cell_radius_m: float = 500.0
    sensing_range_m: float | None = None

    def __post_init__(self) -> None:
        _require_count(self.n_providers, "n_providers", 1)
        _require_count(self.cells_per_provider, "cells_per_provider", 1)
        if not self.cell_radius_m > 0:
            raise ConfigurationError("cell_radius_m must be > 0")
        if self.sensing_range_m is not None and not self.sensing_range_m > 0:
            raise ConfigurationError(
                "sensing_range_m must be > 0 when provided"
            )

    @property
    def effective_sensing_range_m(self) -> float:
        if self.sensing_range_m is None:
            return self.cell_radius_m
        return self.sensing_range_m


@dataclass(frozen=True)
class ChannelConfig:
    """Licensed channel pools and pricing.

    ``channels_per_provider`` and ``alpha`` accept a scalar (same for every
    provider) or one value per provider. A provider may own zero channels;
    every call it receives is then blocked unless it can borrow.
    """

    channels_per_provider: int | tuple[int, ...] = 5
    capacity: int = 10
    base_freq_hz: float = 900e6
    spacing_hz: float = 200e3
    alpha: float | tuple[float, ...] = 0.01

    def __post_init__(self) -> None:
        _require_count(self.capacity, "capacity", 1)
        if not self.base_freq_hz > 0:
            raise ConfigurationError("base_freq_hz must be > 0")
        if not self.spacing_hz > 0:
            raise ConfigurationError("spacing_hz must be > 0")
        counts = (
            self.channels_per_provider
            if isinstance(self.channels_per_provider, (list, tuple))
            else (self.channels_per_provider,)
        )
        for c in counts:
            _require_count(c, "channels_per_provider", 0)
        prices = self.alpha
        if isinstance(prices, (int, float)):
            prices = (prices,)
        if any(not a > 0 for a in prices):
            raise ConfigurationError("alpha must be > 0")
        if not isinstance(self.channels_per_provider, int):
            object.__setattr__(
                self, "channels_per_provider", tuple(self.channels_per_provider)
            )
        if not isinstance(self.alpha, (int, float)):
            object.__setattr__(self, "alpha", tuple(self.alpha))

    def counts(self, n_providers: int) -> tuple[int, ...]:
        if isinstance(self.channels_per_provider, int):
            return (self.channels_per_provider,) * n_providers
        if len(self.channels_per_provider) != n_providers:
            raise ConfigurationError(
                "channels_per_provider has "
                f"{len(self.channels_per_provider)} entries, "
                f"expected one per provider ({n_providers})"
            )
        return tuple(int(c) for c in self.channels_per_provider)

    def prices(self, n_providers: int) -> tuple[float, ...]:
        return _as_tuple(self.alpha, n_providers, "alpha")


@dataclass(frozen=True)
class TrafficConfig:
    """Offered-load model.

    ``mean_rates=None`` derives each provider's mean arrival rate from
    ``population`` (split evenly) times ``user_call_rate``.
    ``epoch_length_s=None`` keeps the first rate draw for the whole run.
    ``covariance``, when given, overrides ``rate_std`` and ``correlation``.
    """

    mean_rates: tuple[float, ...] | None = None
    population: int = 100
    user_call_rate: float = 0.0125
    rate_std: float | tuple[float, ...] = 0.0
    correlation: float = 0.0
    covariance: tuple[tuple[float, ...], ...] | None = None
    mean_holding_s: float = 180.0
    epoch_length_s: float | None = 600.0
    rate_floor: float = 1e-6

    def __post_init__(self) -> None:
        if self.mean_rates is not None:
            object.__setattr__(
                self, "mean_rates", tuple(float(r) for r in self.mean_rates)
            )
            if any(r < 0 for r in self.mean_rates):  # type: ignore[union-attr]
                raise ConfigurationError("mean_rates must be >= 0")
        _require_count(self.population, "population", 1)
        if self.user_call_rate < 0:
            raise ConfigurationError("user_call_rate must be >= 0")
        stds = (
            (self.rate_std,)
            if isinstance(self.rate_std, (int, float))
            else tuple(self.rate_std)
        )
        if any(s < 0 for s in stds):
            raise ConfigurationError("rate_std must be >= 0")
        if not isinstance(self.rate_std, (int, float)):
            object.__setattr__(self, "rate_std", stds)
        if not -1.0 <= self.correlation <= 1.0:
            raise ConfigurationError("correlation must lie in [-1, 1]")
        if self.covariance is not None:
            object.__setattr__(
                self,
                "covariance",
                tuple(tuple(float(v) for v in row) for row in self.covariance),
            )
        if not self.mean_holding_s > 0:
            raise ConfigurationError("mean_holding_s must be > 0")
        if self.epoch_length_s is not None and not self.epoch_length_s > 0:
            raise ConfigurationError("epoch_length_s must be > 0 when provided")
        if not self.rate_floor > 0:
            raise ConfigurationError("rate_floor must be > 0")

    def resolved_mean_rates(self, n_providers: int) -> tuple[float, ...]:
        if self.mean_rates is None:
            per_provider = self.population / n_providers * self.user_call_rate
            return (per_provider,) * n_providers
        if len(self.mean_rates) != n_providers:
            raise ConfigurationError(
                f"mean_rates has {len(self.mean_rates)} entries, "
                f"expected one per provider ({n_providers})"
            )
        return self.mean_rates

    def resolved_rate_std(self, n_providers: int) -> tuple[float, ...]:
        return _as_tuple(self.rate_std, n_providers, "rate_std")

    @property
    def epoch_length(self) -> float:
        return math.inf if self.epoch_length_s is None else self.epoch_length_s


@dataclass(frozen=True)
class SbacConfig:
    """Weights and inputs of the channel-selection utility.

    ``t_call_min=None`` uses the mean holding time expressed in minutes.
    ``prob_mode="global"`` is the literal availability ratio shared by all
    candidates; ``"history"`` scores each candidate by the fraction of the
    last ``history_window`` sweeps in which it was sensed free.
    """

    beta1: float = 1.0
    beta2: float = 1.0
    beta3: float = 1.0
    t_call_min: float | None = None
    prob_mode: ProbMode = "global"
    history_window: int = 10

    def __post_init__(self) -> None:
        betas = (self.beta1, self.beta2, self.beta3)
        if any(b < 0 for b in betas):
            raise ConfigurationError("SBAC weights must be >= 0")
        if not any(b > 0 for b in betas):
            raise ConfigurationError("SBAC weights must not all be zero")
        if self.t_call_min is not None and not self.t_call_min > 0:
            raise ConfigurationError("t_call_min must be > 0 when provided")
        if self.prob_mode not in ("global", "history"):
            raise ConfigurationError(
                "prob_mode must be 'global' or 'history', "
                f"got {self.prob_mode!r}"
            )
        _require_count(self.history_window, "history_window", 1)


@dataclass(frozen=True)
class ProtocolConfig:
    """Timing of the CR overlay and the sensing-error hook.

    The false-free and false-busy probabilities flip the sensed state of a
    channel; at their default of zero no random draws are made.
    """

    message_latency_s: float = 0.005
    reply_timeout_s: float = 0.05
    sensing_period_s: float = 1.0
    pending_timeout_s: float = 0.2
    false_free_prob: float = 0.0
    false_busy_prob: float = 0.0

    def __post_init__(self) -> None:
        if self.message_latency_s < 0:
            raise ConfigurationError("message_latency_s must be >= 0")
        if not self.reply_timeout_s > 0:
            raise ConfigurationError("reply_timeout_s must be > 0")
        if not self.sensing_period_s > 0:
            raise ConfigurationError("sensing_period_s must be > 0")
        if not self.pending_timeout_s > 0:
            raise ConfigurationError("pending_timeout_s must be > 0")
        for name in ("false_free_prob", "false_busy_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class Scenario:
    """One fully specified simulation run.

    ``t_obs_s`` is the simulated horizon. Metrics cover the window after
    the first ``warmup_fraction`` of it.
    """

    seed: int
    name: str = "scenario"
    t_obs_s: float = 3600.0
    warmup_fraction: float = 0.1
    sharing_enabled: bool = True
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    channels: ChannelConfig = field(default_factory=ChannelConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    sbac: SbacConfig = field(default_factory=SbacConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigurationError("seed must be an integer")
        if self.seed < 0:
            raise ConfigurationError("seed must be >= 0")
        if not self.t_obs_s > 0 or math.isinf(self.t_obs_s):
            raise ConfigurationError("t_obs_s must be finite and > 0")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ConfigurationError("warmup_fraction must lie in [0, 1)")
        if not isinstance(self.sharing_enabled, bool):
            raise ConfigurationError("sharing_enabled must be a boolean")
        n = self.topology.n_providers
        # Per-provider sequences must agree with the provider count.
        self.channels.counts(n)
        self.channels.prices(n)
        self.traffic.resolved_mean_rates(n)
        self.traffic.resolved_rate_std(n)
        if self.traffic.covariance is not None and (
            len(self.traffic.covariance) != n
            or any(len(row) != n for row in self.traffic.covariance)
        ):
            raise ConfigurationError(f"covariance must be a {n}x{n} matrix")

    @property
    def warmup_s(self) -> float:
        return self.warmup_fraction * self.t_obs_s

    @property
    def t_call_min(self) -> float:
        if self.sbac.t_call_min is not None:
            return self.sbac.t_call_min
        return self.traffic.mean_holding_s / 60.0


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------

_SECTIONS: Mapping[str, type[Any]] = {
    "topology": TopologyConfig,
    "channels": ChannelConfig,
    "traffic": TrafficConfig,
    "sbac": SbacConfig,
    "protocol": ProtocolConfig,
}


def _freeze(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)  # type: ignore[misc]
    return value


def _build(cls: type[Any], data: Mapping[str, Any], where: str) -> Any:
    if not isinstance(data, Mapping):  # type: ignore[redundant-expr]
        raise ConfigurationError(f"{where} must be a JSON object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(
            f"unknown key(s) in {where}: {', '.join(unknown)}"
        )
    kwargs: dict[str, Any] = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if f.name in _SECTIONS and cls is Scenario:
            kwargs[f.name] = _build(
                _SECTIONS[f.name], value, f"{where}.{f.name}"
            )
        else:
            kwargs[f.name] = _freeze(value)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigurationError(f"invalid {where}: {exc}") from exc


def scenario_from_mapping(
    data: Mapping[str, Any], seed: int | None = None
) -> Scenario:
    """Build a :class:`Scenario` from a decoded JSON document.

    Args:
        data: Decoded JSON object.
        seed: Overrides the document's ``seed`` when given.

    Raises:
        ConfigurationError: unknown keys, missing seed, or invalid values.
    """
    payload = dict(data)
    if seed is not None:
        payload["seed"] = seed
    if "seed" not in payload:
        raise ConfigurationError("scenario seed is mandatory")
    return _build(Scenario, payload, "scenario")


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    """Read a JSON scenario file.

    Raises:
        ConfigurationError: the file is missing, not valid JSON, or
            describes an invalid scenario.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(
            f"cannot read scenario file {str(path)!r}: {exc}"
        ) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"scenario file {str(path)!r} is not valid JSON: {exc}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigurationError("scenario document must be a JSON object")
    return scenario_from_mapping(data, seed=seed)  # type: ignore[arg-type]
