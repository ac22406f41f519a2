from dataclasses import dataclass
from typing import Callable, Optional
import logging

import numpy as np

from errors import ConvergenceError

logger = logging.getLogger(__name__)

# Iteration cap is CG_CAP_FACTOR times the problem dimension
CG_CAP_FACTOR = 50


@dataclass
class KrylovResult:
    x: np.ndarray
    iterations: int
    residual: float


def conjugate_gradient(
    apply: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    tol: float = 1e-12,
    maxiter: Optional[int] = None,
    x0: Optional[np.ndarray] = None,
) -> KrylovResult:
    """
    Conjugate gradient iteration for a matrix-free SPD operator.

    Args:
        apply: callable returning A @ x
        b: right-hand side
        tol: relative residual tolerance ||b - A x|| <= tol ||b||
        maxiter: iteration cap, CG_CAP_FACTOR * dim when None
        x0: initial guess (zero when None)

    Returns:
        KrylovResult with the solution, iteration count and relative residual

    Raises:
        ConvergenceError: when the cap is reached above tolerance
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1:
        raise ValueError(f"Right-hand side must be a vector, got shape {b.shape}")
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    dim = b.size
    if maxiter is None:
        maxiter = CG_CAP_FACTOR * max(dim, 1)

    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return KrylovResult(np.zeros_like(b), 0, 0.0)

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - apply(x) if x0 is not None else b.copy()
    p = r.copy()
    rr = r @ r
    residual = np.sqrt(rr) / b_norm

    iterations = 0
    while residual > tol:
        if iterations >= maxiter:
            raise ConvergenceError(
                f"CG did not reach {tol:.1e} after {iterations} iterations (residual {residual:.3e})",
                iterations=iterations,
                residual=residual,
            )
        Ap = apply(p)
        curvature = p @ Ap
        if curvature <= 0:
            raise ConvergenceError(
                f"CG met non-positive curvature {curvature:.3e} at iteration {iterations}",
                iterations=iterations,
                residual=residual,
            )
        alpha = rr / curvature
        x += alpha * p
        r -= alpha * Ap
        rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new
        residual = np.sqrt(rr) / b_norm
        iterations += 1

    logger.debug(f"CG converged in {iterations} iterations, residual {residual:.3e}")
    return KrylovResult(x, iterations, float(residual))
