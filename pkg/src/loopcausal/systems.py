"""Linear state-space systems and their steady-state maps.

A :class:`LinearSystem` bundles the matrices of

    dx/dt = A x + B u + E w
        y = C x

where ``x`` is the state, ``u`` the control input, ``w`` a process
disturbance, and ``y`` the noise-free output. ``A`` must be Hurwitz so that
every constant ``(u, w)`` pair has a unique, globally attracting steady
state; that property is what makes steady-state datasets meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """State-space matrices of a stable linear plant.

    A: state matrix (n, n), units 1/time
    B: input matrix (n, m)
    E: disturbance matrix (n, d)
    C: output matrix (p, n)
    """

    A: np.ndarray
    B: np.ndarray
    E: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "E", "C"):
            m = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, m)
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n or self.E.shape[0] != n:
            raise ValueError("B and E must have one row per state")
        if self.C.shape[1] != n:
            raise ValueError("C must have one column per state")
        eig = np.linalg.eigvals(self.A)
        if not (eig.real < 0.0).all():
            raise ValueError(
                f"A is not Hurwitz (eigenvalue real parts {np.sort(eig.real)})"
            )

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_disturbances(self) -> int:
        return self.E.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    def is_scalar(self) -> bool:
        """True when all channels are one-dimensional."""
        return (
            self.n_states == 1
            and self.n_inputs == 1
            and self.n_disturbances == 1
            and self.n_outputs == 1
        )


def make_example_system() -> LinearSystem:
    """The scalar demonstration plant dx/dt = -3x + u + w, y = 2x.

    Its steady-state response is y = (2/3)(u + w): input and disturbance
    act on the output with identical gain, which is what lets a controller
    hide the input-output relation in operational data.
    """
    return LinearSystem(A=[[-3.0]], B=[[1.0]], E=[[1.0]], C=[[2.0]])


def steady_state_map(sys: LinearSystem, u, w) -> tuple[np.ndarray, np.ndarray]:
    """Steady state reached under constant input ``u`` and disturbance ``w``.

    Solves A x + B u + E w = 0 and returns ``(x_ss, y)`` with y = C x_ss.
    For a Hurwitz ``A`` the solution exists and is unique; a singular ``A``
    (corrupted input) raises :class:`SingularSystem`.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if u.shape != (sys.n_inputs,):
        raise ValueError(f"u must have shape ({sys.n_inputs},), got {u.shape}")
    if w.shape != (sys.n_disturbances,):
        raise ValueError(f"w must have shape ({sys.n_disturbances},), got {w.shape}")
    try:
        x_ss = np.linalg.solve(sys.A, -(sys.B @ u + sys.E @ w))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("state matrix is numerically singular") from exc
    return x_ss, sys.C @ x_ss


def steady_state_gain(sys: LinearSystem) -> float:
    """Scalar steady-state input-to-output gain, computed from the map itself.

    Only defined for single-input single-output systems; uses the difference
    of two steady states rather than a hand-derived formula so that callers
    never hard-code the true gain.
    """
    if sys.n_inputs != 1 or sys.n_outputs != 1:
        raise ValueError("steady-state gain is defined for SISO systems only")
    w0 = np.zeros(sys.n_disturbances)
    _, y1 = steady_state_map(sys, np.ones(1), w0)
    _, y0 = steady_state_map(sys, np.zeros(1), w0)
    return float(y1[0] - y0[0])
