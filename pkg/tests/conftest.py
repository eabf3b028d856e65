# pyright: reportUnusedFunction=false
from collections.abc import Callable
from typing import Any

import pytest

from crshare.config import (
    ChannelConfig,
    ProtocolConfig,
    Scenario,
    TopologyConfig,
    TrafficConfig,
)

ScenarioFactory = Callable[..., Scenario]


@pytest.fixture
def make_scenario() -> ScenarioFactory:
    """Small, fast scenario with keyword overrides per section.

    ``topology``, ``channels``, ``traffic`` and ``protocol`` accept dicts
    that are merged over the defaults below; other keywords go straight
    to :class:`Scenario`.
    """

    def factory(**overrides: Any) -> Scenario:
        topology: dict[str, Any] = {"n_providers": 2, "cells_per_provider": 1}
        channels: dict[str, Any] = {"channels_per_provider": 2, "capacity": 4}
        traffic: dict[str, Any] = {
            "mean_rates": (0.05, 0.05),
            "epoch_length_s": None,
            "mean_holding_s": 120.0,
        }
        protocol: dict[str, Any] = {}
        topology.update(overrides.pop("topology", {}))
        channels.update(overrides.pop("channels", {}))
        traffic.update(overrides.pop("traffic", {}))
        protocol.update(overrides.pop("protocol", {}))
        kwargs: dict[str, Any] = {"seed": 11, "name": "test", "t_obs_s": 2000.0}
        kwargs.update(overrides)
        return Scenario(
            topology=TopologyConfig(**topology),
            channels=ChannelConfig(**channels),
            traffic=TrafficConfig(**traffic),
            protocol=ProtocolConfig(**protocol),
            **kwargs,
        )

    return factory
