"""Exception types raised across the package.

Every error that callers are expected to catch is defined here so that the
CLI can map them to exit codes in one place. Precondition violations that
have no dedicated class below raise plain ``ValueError``.
"""


class LoopCausalError(Exception):
    """Base class for all package-specific errors."""


# --- simulation ---------------------------------------------------------


class SingularSystem(LoopCausalError):
    """The state matrix is numerically singular; no steady state solvable."""


class NonFinite(LoopCausalError):
    """Integration produced a non-finite state (diverging closed loop)."""


class StabilityCheckFailed(LoopCausalError):
    """The closed-loop state matrix is not Hurwitz for the given controller."""


# --- steady-state detection ---------------------------------------------


class EmptyTrajectory(LoopCausalError):
    """Trajectory has too few samples for the requested detection window."""


class OutOfBounds(LoopCausalError):
    """A steady-state period refers to sample indices outside the trajectory."""


# --- causal graphs ------------------------------------------------------


class CyclicGraph(LoopCausalError):
    """Operation requires an acyclic graph but the input contains a cycle."""


class OverlappingSets(LoopCausalError):
    """Node sets passed to a separation query are not disjoint."""


class ExogenousIntervention(LoopCausalError):
    """Perfect interventions are only defined on endogenous nodes."""


class NotUniquelySolvable(LoopCausalError):
    """A dynamic node lacks the unique-solvability flag needed to equilibrate."""


class ShapeMismatch(LoopCausalError):
    """Graph does not have the feedback shape required for the rewrite."""


# --- estimators ---------------------------------------------------------


class DegenerateDesign(LoopCausalError):
    """Regression design is rank-deficient (too few rows or constant input)."""


class EmptyDataset(LoopCausalError):
    """Estimator called on a dataset with no rows."""


class NonPSDPrecision(LoopCausalError):
    """Supplied precision matrix is not symmetric positive semidefinite."""


class BinMismatch(LoopCausalError):
    """Grouping values are not aligned with the dataset rows."""


class DegenerateInput(LoopCausalError):
    """Diagnostic input is constant or too short to be informative."""


# --- experiment harness -------------------------------------------------


class ConfigParse(LoopCausalError):
    """Scenario or graph configuration file is malformed."""
