"""Steady-state model estimators and diagnostics.

Two model families are fit to steady-state rows (u_i, y_i):

* :func:`naive_ols` -- ordinary least squares of y on (1, u). This captures
  whatever correlation the data happens to contain, including correlation
  injected by a controller reacting to a disturbance.
* :func:`adjusted_map` -- the disturbance-adjusted estimator. It models
  y_i = c u_i + w_i with the per-row disturbance w_i latent, and returns
  the minimum-norm solution (c, w_hat) of the exactly consistent block
  system

      [uᵀu  uᵀ] [c]   [uᵀy]
      [u    I ] [w] = [y  ]

  which coincides with the posterior mode under vanishing equal-precision
  priors on c and w. The estimated disturbance absorbs the confounded part
  of the data, leaving c as an estimate of the causal steady-state gain
  (in the convention where the disturbance-to-output gain is one).

Interventional predictions average the fitted model over the empirical
disturbance sample: y(u) = c u + mean(w_hat).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detect import SteadyStateDataset
from .errors import (
    BinMismatch,
    DegenerateDesign,
    DegenerateInput,
    EmptyDataset,
    NonPSDPrecision,
)


def _uy(dataset) -> tuple[np.ndarray, np.ndarray]:
    """Accept a SteadyStateDataset or a bare (u, y) pair."""
    if isinstance(dataset, SteadyStateDataset):
        return np.asarray(dataset.u_mean, float), np.asarray(dataset.y_mean, float)
    u, y = dataset
    u = np.asarray(u, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if u.shape != y.shape:
        raise ValueError(f"u and y must have equal length, got {u.shape} vs {y.shape}")
    return u, y


@dataclass(frozen=True)
class NaiveFit:
    """Least-squares line y = c0 + c1 u."""

    c0: float
    c1: float
    residual_sse: float


@dataclass(frozen=True)
class AdjustedFit:
    """Disturbance-adjusted model y_i = c u_i + w_hat_i (exact per row)."""

    c: float
    w_hat: np.ndarray
    w_hat_mean: float
    residual_sse: float


@dataclass(frozen=True)
class InterventionalModel:
    """Plug-in evaluation of the adjustment integral for the linear model.

    Holds the causal gain and an empirical sample of the disturbance; the
    prediction at input u is c*u + mean(w_samples).
    """

    c: float
    w_samples: np.ndarray

    @classmethod
    def from_fit(cls, fit: AdjustedFit) -> "InterventionalModel":
        return cls(c=fit.c, w_samples=np.asarray(fit.w_hat, float))

    def predict(self, u: float) -> float:
        return self.c * u + float(np.mean(self.w_samples))


def naive_ols(dataset) -> NaiveFit:
    """Ordinary least squares of y on (1, u).

    Raises DegenerateDesign with fewer than two rows or a constant input
    column.
    """
    u, y = _uy(dataset)
    if len(u) < 2:
        raise DegenerateDesign(f"need at least 2 rows, got {len(u)}")
    du = u - u.mean()
    denom = float(du @ du)
    if denom == 0.0:
        raise DegenerateDesign("input u is constant; slope not identifiable")
    c1 = float(du @ (y - y.mean())) / denom
    c0 = float(y.mean() - c1 * u.mean())
    resid = y - (c0 + c1 * u)
    return NaiveFit(c0=c0, c1=c1, residual_sse=float(resid @ resid))


def adjusted_map(dataset) -> AdjustedFit:
    """Minimum-norm solution of the disturbance-adjusted block system.

    Solved numerically from the assembled (singular, consistent) block
    matrix; the closed form c = uᵀy / (1 + uᵀu), w_hat = y - c u is kept as
    an independent oracle in the test suite.
    """
    u, y = _uy(dataset)
    n = len(u)
    if n == 0:
        raise EmptyDataset("adjusted estimator needs at least one row")
    system = np.empty((n + 1, n + 1))
    system[0, 0] = u @ u
    system[0, 1:] = u
    system[1:, 0] = u
    system[1:, 1:] = np.eye(n)
    rhs = np.concatenate(([u @ y], y))
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    c = float(solution[0])
    w_hat = solution[1:]
    resid = y - (c * u + w_hat)
    return AdjustedFit(
        c=c, w_hat=w_hat, w_hat_mean=float(w_hat.mean()),
        residual_sse=float(resid @ resid),
    )


def adjusted_map_regularized(
    dataset,
    lambda_c: float,
    lambda_w: float,
    smoothness: np.ndarray | None = None,
) -> AdjustedFit:
    """Adjusted estimator with explicit priors on gain and disturbance.

    Minimizes lambda_c*c^2 + w'(lambda_w*I + smoothness)w subject to the
    exact fit y = c u + w. Eliminating w gives the scalar normal equation

        c = uᵀ M y / (lambda_c + uᵀ M u),   M = lambda_w I + smoothness.

    With lambda_c = lambda_w = 1 and no smoothness this is adjusted_map
    exactly. A smoothness precision matrix (for rows ordered in time)
    injects knowledge that the disturbance varies slowly.
    """
    u, y = _uy(dataset)
    n = len(u)
    if n == 0:
        raise EmptyDataset("adjusted estimator needs at least one row")
    if lambda_c < 0 or lambda_w < 0:
        raise ValueError("lambda_c and lambda_w must be >= 0")
    precision = lambda_w * np.eye(n)
    if smoothness is not None:
        smoothness = np.asarray(smoothness, dtype=float)
        if smoothness.shape != (n, n):
            raise NonPSDPrecision(
                f"smoothness must be ({n}, {n}), got {smoothness.shape}"
            )
        if not np.allclose(smoothness, smoothness.T, rtol=1e-9, atol=1e-12):
            raise NonPSDPrecision("smoothness matrix is not symmetric")
        eigmin = float(np.linalg.eigvalsh(smoothness).min())
        if eigmin < -1e-9 * max(1.0, float(np.abs(smoothness).max())):
            raise NonPSDPrecision(f"smoothness has negative eigenvalue {eigmin:g}")
        precision = precision + smoothness
    mu = precision @ u
    denom = lambda_c + float(u @ mu)
    c = float(mu @ y) / denom if denom > 0.0 else 0.0
    w_hat = y - c * u
    return AdjustedFit(
        c=c, w_hat=w_hat, w_hat_mean=float(w_hat.mean()), residual_sse=0.0,
    )


def predict_interventional(fit: AdjustedFit, u: float) -> float:
    """Expected output when the input is pinned to ``u``.

    Evaluates the fitted model with the disturbance at its empirical mean,
    which is the plug-in form of averaging over the disturbance sample.
    """
    return InterventionalModel.from_fit(fit).predict(u)


@dataclass(frozen=True)
class BinnedFit:
    """Per-bin regression; ``fit`` is None when the bin is degenerate."""

    bin_index: int
    w_lo: float
    w_hi: float
    n_rows: int
    fit: NaiveFit | None


def simpson_groups(dataset, w_values, k_bins: int) -> list[BinnedFit]:
    """Naive regressions on rows grouped into equal-width disturbance bins.

    Holding the disturbance roughly constant within a bin removes the
    confounded variation, so per-bin slopes can disagree in sign with the
    pooled slope. Bins with fewer than two rows or constant u are skipped
    with ``fit=None``.
    """
    u, y = _uy(dataset)
    w = np.asarray(w_values, dtype=float).ravel()
    if w.shape != u.shape:
        raise BinMismatch(
            f"w_values length {len(w)} does not match {len(u)} dataset rows"
        )
    if k_bins < 2:
        raise ValueError("k_bins must be >= 2")
    lo, hi = float(w.min()), float(w.max())
    if hi > lo:
        idx = np.floor((w - lo) / (hi - lo) * k_bins).astype(int)
        idx = np.clip(idx, 0, k_bins - 1)
        width = (hi - lo) / k_bins
    else:
        idx = np.zeros(len(w), dtype=int)
        width = 0.0
    out: list[BinnedFit] = []
    for b in range(k_bins):
        mask = idx == b
        n_rows = int(mask.sum())
        fit = None
        if n_rows >= 2:
            try:
                fit = naive_ols((u[mask], y[mask]))
            except DegenerateDesign:
                fit = None
        out.append(
            BinnedFit(
                bin_index=b, w_lo=lo + b * width, w_hi=lo + (b + 1) * width,
                n_rows=n_rows, fit=fit,
            )
        )
    return out


@dataclass(frozen=True)
class DisturbanceAlignment:
    """Affine fit w_hat ~ scale * w_true + offset plus Pearson correlation."""

    scale: float
    offset: float
    pearson_r: float


def disturbance_alignment(w_hat, w_true) -> DisturbanceAlignment:
    """How the estimated disturbance tracks the true one.

    Latent-variable estimates recover the disturbance only up to an affine
    transform, so the comparison is the least-squares scale/offset plus the
    correlation coefficient.
    """
    w_hat = np.asarray(w_hat, dtype=float).ravel()
    w_true = np.asarray(w_true, dtype=float).ravel()
    if w_hat.shape != w_true.shape:
        raise DegenerateInput("w_hat and w_true must have equal length")
    if len(w_hat) < 2:
        raise DegenerateInput("need at least 2 samples")
    dt = w_true - w_true.mean()
    denom = float(dt @ dt)
    if denom == 0.0:
        raise DegenerateInput("w_true is constant; alignment not identifiable")
    scale = float(dt @ (w_hat - w_hat.mean())) / denom
    offset = float(w_hat.mean() - scale * w_true.mean())
    dh = w_hat - w_hat.mean()
    norm = float(np.sqrt((dh @ dh) * denom))
    pearson_r = float(dh @ dt) / norm if norm > 0.0 else 0.0
    return DisturbanceAlignment(scale=scale, offset=offset, pearson_r=pearson_r)
