"""Exogenous signal generators for disturbances, references, and schedules.

Generators are pure: the value at time ``t`` depends only on ``t`` and the
generator's parameters. Piecewise-constant levels are derived from a
counter-based RNG keyed on (seed, interval index), so a signal can be
evaluated at any ``t`` without replaying history and two evaluations of the
same generator always agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Sinusoid:
    """amplitude * sin(angular_frequency * t + phase)"""

    amplitude: float
    angular_frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")


@dataclass(frozen=True)
class PiecewiseConstant:
    """Piecewise-constant signal with one uniform draw per interval.

    The level on interval k = floor(t / switch_interval) is drawn from
    U[low, high] by an RNG seeded with (seed, k).
    """

    seed: int
    switch_interval: float
    low: float
    high: float

    def __post_init__(self):
        if self.switch_interval <= 0:
            raise ValueError("switch_interval must be > 0")
        if self.low > self.high:
            raise ValueError("low must be <= high")


@dataclass(frozen=True)
class Constant:
    value: float


SignalGenerator = Sinusoid | PiecewiseConstant | Constant


@lru_cache(maxsize=None)
def _interval_level(seed: int, k: int, low: float, high: float) -> float:
    # One fresh Generator per (seed, interval); cached because integration
    # evaluates the same interval hundreds of times.
    return float(np.random.default_rng((seed, k)).uniform(low, high))


def eval_signal(g: SignalGenerator, t: float) -> float:
    """Value of generator ``g`` at time ``t`` (pure, deterministic)."""
    if isinstance(g, Sinusoid):
        return g.amplitude * math.sin(g.angular_frequency * t + g.phase)
    if isinstance(g, PiecewiseConstant):
        k = int(math.floor(t / g.switch_interval))
        return _interval_level(g.seed, k, g.low, g.high)
    if isinstance(g, Constant):
        return g.value
    raise TypeError(f"unknown signal generator {type(g).__name__}")
