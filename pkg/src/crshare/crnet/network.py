"""What protocol state machines need from the event loop."""

from __future__ import annotations

from typing import Protocol

from .messages import Message


class TimerTarget(Protocol):
    def on_timer(self, token: int, now: float) -> None: ...


class Network(Protocol):
    """Transport and clock services supplied by the engine.

    ``send`` delivers a message after the configured latency. ``note``
    only records a message in the trace (exchanges with mobiles, which are
    not simulated as deliveries). ``set_timer`` calls
    ``target.on_timer(token, now)`` after *delay* seconds.
    """

    def send(self, msg: Message) -> None: ...

    def note(self, msg: Message) -> None: ...

    def set_timer(
        self, delay: float, target: TimerTarget, token: int
    ) -> None: ...
