"""Error taxonomy for crshare.

Each exception maps to a specific caller behaviour, and to a distinct CLI
exit code. Keeping them distinct means a configuration mistake is never
confused with a simulation bug.
"""

from __future__ import annotations

from collections.abc import Mapping
from types import MappingProxyType


class CrShareError(Exception):
    """Base class for all crshare errors."""


class ConfigurationError(CrShareError, ValueError):
    """A scenario, topology or model parameter is invalid.

    Raised before any event is processed. The CLI exits with code 2.
    Subclasses ``ValueError`` so config validation reads like the rest of
    the dataclass ``__post_init__`` checks.
    """


class InvariantFault(CrShareError):
    """The simulation reached a state that must be unreachable.

    Always a bug in the simulator, never a property of the scenario. The
    run is aborted; the CLI exits with code 3 and prints ``state`` as a
    diagnostic dump.

    Attributes:
        state: Snapshot of the simulator at the time of the fault
            (simulated time, event kind, counters). Read-only.
    """

    def __init__(
        self, message: str, state: Mapping[str, object] | None = None
    ) -> None:
        super().__init__(message)
        self.state: Mapping[str, object] = MappingProxyType(dict(state or {}))
