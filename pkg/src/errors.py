"""Exceptions shared by the assembly, substructuring and spectra modules."""

from typing import Optional, Tuple


class DimensionError(ValueError):
    """A vector does not match the partition it is applied to."""


class SolverBreakdownError(RuntimeError):
    """A symmetric factorization met a non-positive pivot or its solves stalled above the inner tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative method stopped before certifying its tolerance."""

    def __init__(self, message: str, iterations: int, residual: float,
                 estimates: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.estimates = estimates
