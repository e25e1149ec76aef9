# =============================================================
#  markov/errors.py – exception hierarchy for the solver library
# =============================================================
from __future__ import annotations

from typing import Any


class HigherOrderMarkovError(Exception):
    """Root of every error raised on purpose by this package."""


class TensorStructureError(HigherOrderMarkovError, ValueError):
    """Malformed tensor: bad order/dim, index out of range, bad file line."""


class StochasticityError(HigherOrderMarkovError, ValueError):
    """A tensor failed the transition-probability invariants."""

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result


class DimensionMismatchError(HigherOrderMarkovError, ValueError):
    """Vector length does not match the tensor dimension."""


class NoPositiveMassError(HigherOrderMarkovError, ValueError):
    """proj() was handed a vector without a single positive component."""


class ConditionSizeError(HigherOrderMarkovError, ValueError):
    """Exact subset enumeration would be too large."""


class SolverError(HigherOrderMarkovError, RuntimeError):
    """Numerical failure inside a solver step."""

    def __init__(self, message: str, iteration: int | None = None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration
