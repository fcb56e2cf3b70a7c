"""Memoryless scalar controllers.

Three control strategies cover the spectrum from fully randomized to fully
reactive inputs:

* :class:`OpenLoop` plays back a schedule and ignores all measurements.
* :class:`Feedforward` reacts to the reference and a disturbance
  measurement but never looks at the output.
* :class:`PFeedback` is a proportional controller acting on the output
  error and never sees the disturbance directly.

All controllers are pure functions of their arguments; none keeps internal
state between calls (integral action is deliberately out of scope).
"""

from __future__ import annotations

from dataclasses import dataclass

from .signals import SignalGenerator, eval_signal


@dataclass(frozen=True)
class OpenLoop:
    """u(t) = schedule(t); the schedule must be defined on the whole horizon."""

    schedule: SignalGenerator


@dataclass(frozen=True)
class Feedforward:
    """u = reference_gain * y_r - disturbance_gain * w + bias."""

    reference_gain: float
    disturbance_gain: float
    bias: float = 0.0


@dataclass(frozen=True)
class PFeedback:
    """u = Kp * (y_r - y)."""

    Kp: float

    def __post_init__(self):
        if not (self.Kp == self.Kp and abs(self.Kp) != float("inf")):
            raise ValueError("Kp must be finite")


Controller = OpenLoop | Feedforward | PFeedback


def eval_controller(c: Controller, t: float, y_r: float, w: float, y: float) -> float:
    """Control input produced by ``c`` at time ``t``.

    Each variant uses only the measurements its strategy permits: open loop
    ignores (y_r, w, y), feedforward ignores y, feedback ignores w.
    """
    if isinstance(c, OpenLoop):
        return eval_signal(c.schedule, t)
    if isinstance(c, Feedforward):
        return c.reference_gain * y_r - c.disturbance_gain * w + c.bias
    if isinstance(c, PFeedback):
        return c.Kp * (y_r - y)
    raise TypeError(f"unknown controller {type(c).__name__}")
