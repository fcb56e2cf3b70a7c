"""Steady-state period detection and dataset extraction.

A window of ``window_len`` consecutive samples is steady when every sample
in it stays within a sup-norm tolerance ``epsilon`` of the window's first
sample, taken componentwise over the monitored channels. Overlapping steady
windows are merged into maximal periods and each period is collapsed into a
single dataset row holding channel averages.

Detection normally monitors the state vector; real installations rarely
measure the state, so ``channel_mode="measured_io"`` monitors the measured
(u, y) pair instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .errors import EmptyTrajectory, OutOfBounds
from .simulate import Trajectory

CHANNEL_MODES = ("state", "measured_io")


@dataclass(frozen=True)
class DetectionConfig:
    """window_len is counted in samples, so its duration scales with dt."""

    window_len: int = 3
    epsilon: float = 0.05
    channel_mode: str = "state"

    def __post_init__(self):
        if self.window_len < 2:
            raise ValueError("window_len must be >= 2")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.channel_mode not in CHANNEL_MODES:
            raise ValueError(f"channel_mode must be one of {CHANNEL_MODES}")


@dataclass(frozen=True, slots=True)
class SteadyStatePeriod:
    """Inclusive index range [start_index, end_index] on the trajectory grid."""

    t0: float
    tf: float
    start_index: int
    end_index: int

    def __post_init__(self):
        if self.t0 >= self.tf:
            raise ValueError("period must satisfy t0 < tf")
        if self.start_index >= self.end_index or self.start_index < 0:
            raise ValueError("period indices must satisfy 0 <= start < end")


class DatasetRow(NamedTuple):
    t_mid: float
    u_mean: float
    y_mean: float
    w_mean: float
    n_samples: int


@dataclass
class SteadyStateDataset:
    """One averaged (u, y, w) row per detected steady-state period.

    The periods backing the rows are pairwise disjoint. w_mean is carried as
    a diagnostic: it is unobserved by the naive modelling problem but needed
    to show what the controller was reacting to.
    """

    t_mid: np.ndarray
    u_mean: np.ndarray
    y_mean: np.ndarray
    w_mean: np.ndarray
    n_samples: np.ndarray
    detection: DetectionConfig | None = None
    source: str = ""

    def __len__(self) -> int:
        return len(self.t_mid)

    def rows(self) -> Iterator[DatasetRow]:
        for i in range(len(self)):
            yield DatasetRow(
                float(self.t_mid[i]),
                float(self.u_mean[i]),
                float(self.y_mean[i]),
                float(self.w_mean[i]),
                int(self.n_samples[i]),
            )


def _monitored_channels(traj: Trajectory, cfg: DetectionConfig) -> np.ndarray:
    if cfg.channel_mode == "state":
        return traj.x
    return np.column_stack([traj.u, traj.y])


def detect_windows(traj: Trajectory, cfg: DetectionConfig) -> list[SteadyStatePeriod]:
    """Every steady window of length ``cfg.window_len``, in grid order.

    Window i passes when max over the window of the componentwise deviation
    from the values at index i is strictly below epsilon.
    """
    n = len(traj)
    if n < cfg.window_len:
        raise EmptyTrajectory(
            f"trajectory has {n} samples, need at least {cfg.window_len}"
        )
    ch = _monitored_channels(traj, cfg)
    n_windows = n - cfg.window_len + 1
    anchor = ch[:n_windows]
    dev = np.zeros(n_windows)
    for off in range(1, cfg.window_len):
        step = np.abs(ch[off : off + n_windows] - anchor).max(axis=1)
        np.maximum(dev, step, out=dev)
    starts = np.flatnonzero(dev < cfg.epsilon)
    last = cfg.window_len - 1
    t = traj.t
    return [
        SteadyStatePeriod(
            t0=float(t[i]), tf=float(t[i + last]), start_index=int(i),
            end_index=int(i + last),
        )
        for i in starts
    ]


def merge_overlapping(windows: list[SteadyStatePeriod]) -> list[SteadyStatePeriod]:
    """Union of overlapping windows as maximal disjoint periods.

    Two windows merge only when they share at least one sample index;
    merely adjacent windows ([0,2] and [3,5]) stay separate. Idempotent.
    """
    if not windows:
        return []
    ordered = sorted(windows, key=lambda p: (p.start_index, p.end_index))
    merged: list[SteadyStatePeriod] = []
    cur = ordered[0]
    for win in ordered[1:]:
        if win.start_index <= cur.end_index:
            if win.end_index > cur.end_index:
                cur = SteadyStatePeriod(
                    t0=cur.t0, tf=win.tf,
                    start_index=cur.start_index, end_index=win.end_index,
                )
        else:
            merged.append(cur)
            cur = win
    merged.append(cur)
    return merged


def aggregate(
    traj: Trajectory,
    periods: list[SteadyStatePeriod],
    cfg: DetectionConfig | None = None,
    source: str = "",
) -> SteadyStateDataset:
    """Collapse each period into one row of channel means.

    t_mid is the midpoint of the period in time; u, y, w are arithmetic
    means over the period's samples.
    """
    n = len(traj)
    t_mid = np.empty(len(periods))
    u_mean = np.empty(len(periods))
    y_mean = np.empty(len(periods))
    w_mean = np.empty(len(periods))
    n_samples = np.empty(len(periods), dtype=int)
    for i, p in enumerate(periods):
        if p.end_index >= n:
            raise OutOfBounds(
                f"period [{p.start_index}, {p.end_index}] exceeds trajectory "
                f"length {n}"
            )
        sl = slice(p.start_index, p.end_index + 1)
        t_mid[i] = 0.5 * (traj.t[p.start_index] + traj.t[p.end_index])
        u_mean[i] = traj.u[sl].mean()
        y_mean[i] = traj.y[sl].mean()
        w_mean[i] = traj.w[sl].mean()
        n_samples[i] = p.end_index - p.start_index + 1
    return SteadyStateDataset(
        t_mid=t_mid, u_mean=u_mean, y_mean=y_mean, w_mean=w_mean,
        n_samples=n_samples, detection=cfg, source=source,
    )


def detect(traj: Trajectory, cfg: DetectionConfig, source: str = "") -> SteadyStateDataset:
    """Full pipeline: detect windows, merge overlaps, aggregate to rows."""
    windows = detect_windows(traj, cfg)
    periods = merge_overlapping(windows)
    return aggregate(traj, periods, cfg=cfg, source=source)
