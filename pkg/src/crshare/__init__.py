"""Top-level package for crshare."""

from importlib.metadata import PackageNotFoundError, version

from .config import (
    ChannelConfig,
    ProtocolConfig,
    SbacConfig,
    Scenario,
    TopologyConfig,
    TrafficConfig,
    load_scenario,
    scenario_from_mapping,
)
from .engine import RunResult, run, summarize, sweep
from .errors import ConfigurationError, CrShareError, InvariantFault
from .metrics import MetricsReport, ProviderMetrics
from .observability import MessageTracer, NullTracer, TraceEvent
from .storage import LocalFileStorage, StorageError
from .teletraffic import erlang_b, offered_load
from .world import build_topology

try:
    __version__ = version("crshare-sim")
except PackageNotFoundError:  # pragma: no cover
    # Source checkout without metadata; bump with every release.
    __version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "ConfigurationError",
    "CrShareError",
    "InvariantFault",
    "LocalFileStorage",
    "MessageTracer",
    "MetricsReport",
    "NullTracer",
    "ProtocolConfig",
    "ProviderMetrics",
    "RunResult",
    "SbacConfig",
    "Scenario",
    "StorageError",
    "TopologyConfig",
    "TraceEvent",
    "TrafficConfig",
    "__version__",
    "build_topology",
    "erlang_b",
    "load_scenario",
    "offered_load",
    "run",
    "scenario_from_mapping",
    "summarize",
    "sweep",
]
