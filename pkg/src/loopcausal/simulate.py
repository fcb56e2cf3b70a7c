"""Closed-loop integration of a linear plant with a memoryless controller.

The loop is integrated with classical fixed-step fourth-order Runge-Kutta.
The controller is re-evaluated at every RK4 stage from the stage-local
output y = C x and the stage time's reference and disturbance values, i.e.
the controller samples its inputs continuously rather than once per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controllers import Controller, PFeedback, eval_controller
from .errors import NonFinite, StabilityCheckFailed
from .signals import SignalGenerator, eval_signal
from .systems import LinearSystem


@dataclass(eq=False)
class Trajectory:
    """Uniformly sampled closed-loop run.

    t has shape (N,), x has shape (N, n); u, w, y, y_r are scalar channels
    of shape (N,). All channels share the grid.
    """

    dt: float
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    w: np.ndarray
    y: np.ndarray
    y_r: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in ("x", "u", "w", "y", "y_r"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"channel {name} does not match the time grid")
        if n >= 2:
            steps = np.diff(self.t)
            if not (steps > 0).all():
                raise ValueError("t must be strictly increasing")
            if not np.allclose(steps, self.dt, rtol=1e-9, atol=1e-12):
                raise ValueError("t must be uniformly spaced by dt")

    def __len__(self) -> int:
        return len(self.t)


def check_closed_loop_stable(sys: LinearSystem, ctrl: Controller) -> None:
    """Raise StabilityCheckFailed if proportional feedback destabilizes ``sys``.

    With u = Kp (y_r - y) the closed-loop state matrix is A - B Kp C; it must
    be Hurwitz. Open-loop and feedforward control leave A untouched and A is
    Hurwitz by construction.
    """
    if isinstance(ctrl, PFeedback):
        a_cl = sys.A - sys.B @ (ctrl.Kp * sys.C)
        eig = np.linalg.eigvals(a_cl)
        if not (eig.real < 0.0).all():
            raise StabilityCheckFailed(
                f"closed-loop matrix not Hurwitz for Kp={ctrl.Kp} "
                f"(eigenvalue real parts {np.sort(eig.real)})"
            )


def integrate(
    sys: LinearSystem,
    ctrl: Controller,
    dist: SignalGenerator,
    ref: SignalGenerator,
    x0,
    t_end: float,
    dt: float,
) -> Trajectory:
    """Integrate the closed loop on a uniform grid from 0 to ``t_end``.

    Raises NonFinite if the state diverges and StabilityCheckFailed if the
    feedback loop is unstable at the given gain.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if t_end <= dt:
        raise ValueError("t_end must exceed dt")
    check_closed_loop_stable(sys, ctrl)

    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (sys.n_states,):
        raise ValueError(f"x0 must have shape ({sys.n_states},), got {x0.shape}")

    n_steps = int(round(t_end / dt))
    t = np.arange(n_steps + 1) * dt

    if sys.is_scalar():
        return _integrate_scalar(sys, ctrl, dist, ref, float(x0[0]), t, dt)
    if sys.n_inputs == 1 and sys.n_disturbances == 1 and sys.n_outputs == 1:
        return _integrate_vector(sys, ctrl, dist, ref, x0, t, dt)
    raise ValueError("closed-loop integration requires scalar u, w, and y channels")


def _integrate_scalar(sys, ctrl, dist, ref, x0, t, dt) -> Trajectory:
    # Specialized float loop: the default scenarios take ~250k steps, and
    # plain floats are an order of magnitude faster than 1-element arrays.
    a = float(sys.A[0, 0])
    b = float(sys.B[0, 0])
    e = float(sys.E[0, 0])
    c = float(sys.C[0, 0])

    n = len(t)
    xs = np.empty(n)
    us = np.empty(n)
    ws = np.empty(n)
    ys = np.empty(n)
    yrs = np.empty(n)

    half = 0.5 * dt
    x = x0
    for i in range(n):
        ti = t[i]
        w0 = eval_signal(dist, ti)
        r0 = eval_signal(ref, ti)
        u0 = eval_controller(ctrl, ti, r0, w0, c * x)
        xs[i] = x
        us[i] = u0
        ws[i] = w0
        ys[i] = c * x
        yrs[i] = r0
        if i == n - 1:
            break

        k1 = a * x + b * u0 + e * w0

        tm = ti + half
        wm = eval_signal(dist, tm)
        rm = eval_signal(ref, tm)
        x2 = x + half * k1
        k2 = a * x2 + b * eval_controller(ctrl, tm, rm, wm, c * x2) + e * wm

        x3 = x + half * k2
        k3 = a * x3 + b * eval_controller(ctrl, tm, rm, wm, c * x3) + e * wm

        te = ti + dt
        we = eval_signal(dist, te)
        re = eval_signal(ref, te)
        x4 = x + dt * k3
        k4 = a * x4 + b * eval_controller(ctrl, te, re, we, c * x4) + e * we

        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(x):
            raise NonFinite(f"state became non-finite at t={te:g}")

    return Trajectory(dt=dt, t=t, x=xs.reshape(-1, 1), u=us, w=ws, y=ys, y_r=yrs)


def _integrate_vector(sys, ctrl, dist, ref, x0, t, dt) -> Trajectory:
    A, B, E, C = sys.A, sys.B, sys.E, sys.C
    b = B[:, 0]
    e = E[:, 0]
    c_row = C[0]

    n = len(t)
    xs = np.empty((n, sys.n_states))
    us = np.empty(n)
    ws = np.empty(n)
    ys = np.empty(n)
    yrs = np.empty(n)

    half = 0.5 * dt
    x = x0.copy()

    def deriv(tau, xv, wv, rv):
        u = eval_controller(ctrl, tau, rv, wv, float(c_row @ xv))
        return A @ xv + b * u + e * wv, u

    for i in range(n):
        ti = t[i]
        w0 = eval_signal(dist, ti)
        r0 = eval_signal(ref, ti)
        d1, u0 = deriv(ti, x, w0, r0)
        xs[i] = x
        us[i] = u0
        ws[i] = w0
        ys[i] = c_row @ x
        yrs[i] = r0
        if i == n - 1:
            break

        tm = ti + half
        wm = eval_signal(dist, tm)
        rm = eval_signal(ref, tm)
        d2, _ = deriv(tm, x + half * d1, wm, rm)
        d3, _ = deriv(tm, x + half * d2, wm, rm)
        te = ti + dt
        we = eval_signal(dist, te)
        re = eval_signal(ref, te)
        d4, _ = deriv(te, x + dt * d3, we, re)

        x = x + (dt / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
        if not np.isfinite(x).all():
            raise NonFinite(f"state became non-finite at t={te:g}")

    return Trajectory(dt=dt, t=t, x=xs, u=us, w=ws, y=ys, y_r=yrs)
