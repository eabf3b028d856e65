"""Correlated offered-load model.

Per-provider mean arrival rates are a jointly Gaussian vector
``mu + L @ z`` where ``L`` is a lower-triangular square root of the
covariance. They are redrawn every epoch and clamped at ``rate_floor``.
Within an epoch each provider's calls arrive as a Poisson process; call
holding times are exponential.

Exponential variates are drawn by inverse CDF from one uniform each, so
every draw consumes exactly one number of its stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..config import TrafficConfig
from ..errors import ConfigurationError

FloatArray = npt.NDArray[np.float64]

_PSD_TOL = 1e-10


@dataclass(frozen=True, slots=True)
class Call:
    """One call attempt. ``holding_time`` is drawn at arrival."""

    id: int
    provider: int
    cell: int
    arrival_time: float
    holding_time: float


@dataclass(frozen=True)
class TrafficModel:
    """Resolved traffic parameters for ``n`` providers."""

    mean_rates: FloatArray
    covariance: FloatArray
    factor: FloatArray
    mean_holding: float
    epoch_length: float
    rate_floor: float

    @property
    def n_providers(self) -> int:
        return int(self.mean_rates.shape[0])

    @classmethod
    def from_config(cls, cfg: TrafficConfig, n_providers: int) -> TrafficModel:
        """Assemble the covariance, check it and factor it.

        Raises:
            ConfigurationError: the covariance is not symmetric positive
                semi-definite (for instance a correlation below
                ``-1 / (n - 1)``).
        """
        mu = np.asarray(cfg.resolved_mean_rates(n_providers), dtype=float)
        if cfg.covariance is not None:
            cov = np.asarray(cfg.covariance, dtype=float)
        else:
            std = np.asarray(cfg.resolved_rate_std(n_providers), dtype=float)
            corr = np.full((n_providers, n_providers), cfg.correlation)
            np.fill_diagonal(corr, 1.0)
            cov = corr * np.outer(std, std)
        return cls(
            mean_rates=mu,
            covariance=cov,
            factor=psd_cholesky(cov),
            mean_holding=cfg.mean_holding_s,
            epoch_length=cfg.epoch_length,
            rate_floor=cfg.rate_floor,
        )


def psd_cholesky(cov: FloatArray) -> FloatArray:
    """Lower-triangular ``L`` with ``L @ L.T == cov`` for PSD *cov*.

    Unlike ``numpy.linalg.cholesky`` this accepts singular matrices
    (perfect correlation, zero variances): a zero pivot yields a zero
    column.

    Raises:
        ConfigurationError: *cov* is not square, not symmetric, or has a
            negative eigenvalue.
    """
    a = np.asarray(cov, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError("covariance must be a square matrix")
    if not np.all(np.isfinite(a)):
        raise ConfigurationError("covariance must be finite")
    if not np.allclose(a, a.T):
        raise ConfigurationError("covariance must be symmetric")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and float(np.linalg.eigvalsh(a).min()) < -_PSD_TOL * scale:
        raise ConfigurationError("covariance must be positive semi-definite")

    n = a.shape[0]
    low = np.zeros_like(a)
    for i in range(n):
        for j in range(i + 1):
            s = float(low[i, :j] @ low[j, :j])
            if i == j:
                d = a[i, i] - s
                low[i, j] = math.sqrt(d) if d > _PSD_TOL * scale else 0.0
            elif low[j, j] > 0.0:
                low[i, j] = (a[i, j] - s) / low[j, j]
    return low


def sample_rates(
    model: TrafficModel, rng: np.random.Generator, clamp: bool = True
) -> FloatArray:
    """Draw one per-provider rate vector (calls/second).

    Always consumes ``n_providers`` standard normals, including the
    degenerate zero-variance case, so redraws stay aligned with the seed.
    ``clamp=False`` returns the raw Gaussian draw.
    """
    z = rng.standard_normal(model.n_providers)
    rates = model.mean_rates + model.factor @ z
    if clamp:
        rates = np.maximum(rates, model.rate_floor)
    return rates


def exponential_from_uniform(u: float, rate: float) -> float:
    """Inverse CDF of ``Exp(rate)`` at survival probability *u* in (0, 1]."""
    return -math.log(u) / rate


def next_arrival(rate: float, now: float, rng: np.random.Generator) -> float:
    """Next Poisson arrival after *now*; always strictly later."""
    u = 1.0 - float(rng.random())
    t = now + exponential_from_uniform(u, rate)
    if t <= now:
        t = math.nextafter(now, math.inf)
    return t


def draw_holding(mean_holding: float, rng: np.random.Generator) -> float:
    """Exponential holding time with mean *mean_holding*; always > 0."""
    u = 1.0 - float(rng.random())
    h = exponential_from_uniform(u, 1.0 / mean_holding)
    return h if h > 0.0 else math.ulp(0.0)
