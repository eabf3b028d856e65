"""Closed-form teletraffic references for validating simulated blocking."""

from __future__ import annotations

from .errors import ConfigurationError


def offered_load(rate: float, mean_holding: float) -> float:
    """Offered load in Erlangs: arrival rate (calls/s) times holding (s)."""
    if rate < 0 or mean_holding < 0:
        raise ConfigurationError("rate and mean_holding must be >= 0")
    return rate * mean_holding


def erlang_b(servers: int, load: float) -> float:
    """Blocking probability of an M/M/N/N loss system.

    Uses the stable recursion ``B(0) = 1``,
    ``B(n) = a B(n-1) / (n + a B(n-1))``.

    Raises:
        ConfigurationError: ``servers`` < 0 or ``load`` < 0.
    """
    if servers < 0:
        raise ConfigurationError("servers must be >= 0")
    if load < 0:
        raise ConfigurationError("load must be >= 0")
    b = 1.0
    for n in range(1, servers + 1):
        b = load * b / (n + load * b)
    return b
