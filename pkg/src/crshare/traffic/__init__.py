"""Correlated offered load: rate draws, Poisson arrivals, holding times."""

from .model import (
    Call,
    TrafficModel,
    draw_holding,
    next_arrival,
    psd_cholesky,
    sample_rates,
)
from .streams import Purpose, RngStreams, derive_seed

__all__ = [
    "Call",
    "Purpose",
    "RngStreams",
    "TrafficModel",
    "derive_seed",
    "draw_holding",
    "next_arrival",
    "psd_cholesky",
    "sample_rates",
]
