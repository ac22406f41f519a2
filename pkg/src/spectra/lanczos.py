from dataclasses import dataclass
from typing import Callable, Optional, Tuple
import logging

import numpy as np
import scipy.linalg as la

from errors import ConvergenceError

logger = logging.getLogger(__name__)

LANCZOS_SEED = 0x5EED
LANCZOS_CAP_FACTOR = 3
DEFAULT_TOL = 1e-8
# Initial Krylov basis rows; the basis doubles when full
BASIS_CHUNK = 64


@dataclass
class LanczosResult:
    lambda_min: float
    lambda_max: float
    iterations: int
    residual_min: float
    residual_max: float

    @property
    def kappa(self) -> float:
        return self.lambda_max / self.lambda_min

    @property
    def residual(self) -> float:
        """Largest certified relative residual of the two Ritz pairs."""
        return max(self.residual_min, self.residual_max)

    def as_tuple(self) -> Tuple[float, float]:
        return self.lambda_min, self.lambda_max


def _ritz_pair(alphas: np.ndarray, betas: np.ndarray, index: int):
    if alphas.size == 1:
        return alphas[0], np.ones(1)
    values, vectors = la.eigh_tridiagonal(alphas, betas, select="i", select_range=(index, index))
    return values[0], vectors[:, 0]


def lanczos_extremal(
    op: Callable[[np.ndarray], np.ndarray],
    dim: int,
    tol: float = DEFAULT_TOL,
    maxiter: Optional[int] = None,
    seed: int = LANCZOS_SEED,
) -> LanczosResult:
    """
    Extremal eigenvalues of a symmetric positive definite operator.

    Lanczos with full reorthogonalization (two Gram-Schmidt passes per step).
    Both extreme Ritz values are accepted once their true residuals satisfy
    ||op x - theta x|| <= tol * theta * ||x||.

    Args:
        op: callable returning the operator applied to a vector
        dim: dimension of the operator
        tol: relative residual tolerance
        maxiter: iteration cap, LANCZOS_CAP_FACTOR * dim when None
        seed: seed of the random start vector

    Returns:
        LanczosResult

    Raises:
        ConvergenceError: when the cap is reached or the Krylov space is exhausted
            without certified residuals, with the best estimates attached
    """
    if dim < 1:
        raise ValueError(f"Operator dimension must be >= 1, got {dim}")
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    if maxiter is None:
        maxiter = LANCZOS_CAP_FACTOR * dim
    steps = min(maxiter, dim)

    rng = np.random.default_rng(seed)
    basis = np.zeros((min(steps, BASIS_CHUNK), dim))
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)

    alphas, betas = [], []
    beta = 0.0
    theta_min = theta_max = np.nan
    estimates = (np.inf, np.inf)

    for k in range(steps):
        if k == basis.shape[0]:
            basis = _grow(basis, steps)
        basis[k] = q
        w = np.asarray(op(q), dtype=float)
        if w.shape != (dim,):
            raise ValueError(f"Operator returned shape {w.shape}, expected ({dim},)")
        alpha = float(q @ w)
        w = w - alpha * q
        if k > 0:
            w -= beta * basis[k - 1]
        for _ in range(2):
            w -= basis[: k + 1].T @ (basis[: k + 1] @ w)
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))

        a = np.asarray(alphas)
        b = np.asarray(betas)
        theta_min, s_min = _ritz_pair(a, b, 0)
        theta_max, s_max = _ritz_pair(a, b, k)
        estimates = (beta * abs(s_min[-1]), beta * abs(s_max[-1]))

        scale = max(abs(theta_max), np.finfo(float).tiny)
        exhausted = beta <= 10 * np.finfo(float).eps * scale * np.sqrt(dim) or k + 1 == dim
        if exhausted or (estimates[0] <= tol * abs(theta_min) and estimates[1] <= tol * abs(theta_max)):
            residual_min = _true_residual(op, basis[: k + 1], s_min, theta_min)
            residual_max = _true_residual(op, basis[: k + 1], s_max, theta_max)
            if residual_min <= tol and residual_max <= tol:
                if exhausted and k + 1 < dim:
                    logger.warning(f"Lanczos stopped on Krylov exhaustion after {k + 1} of {dim} steps")
                logger.debug(
                    f"Lanczos converged in {k + 1} iterations: [{theta_min:.6e}, {theta_max:.6e}] "
                    f"residuals {residual_min:.2e} {residual_max:.2e}"
                )
                return LanczosResult(float(theta_min), float(theta_max), k + 1, residual_min, residual_max)
            if exhausted:
                raise ConvergenceError(
                    f"Lanczos exhausted the Krylov space after {k + 1} iterations with residuals "
                    f"{residual_min:.2e} {residual_max:.2e} above {tol:.2e}",
                    iterations=k + 1,
                    residual=max(residual_min, residual_max),
                    estimates=(float(theta_min), float(theta_max)),
                )

        betas.append(beta)
        q = w / beta

    raise ConvergenceError(
        f"Lanczos did not converge within {steps} iterations "
        f"(estimates [{theta_min:.6e}, {theta_max:.6e}])",
        iterations=steps,
        residual=float(max(estimates)),
        estimates=(float(theta_min), float(theta_max)),
    )


def _true_residual(op, basis: np.ndarray, s: np.ndarray, theta: float) -> float:
    """||op x - theta x|| / (|theta| ||x||) for the Ritz vector x = basis^T s."""
    x = basis.T @ s
    norm = np.linalg.norm(x) * max(abs(theta), np.finfo(float).tiny)
    return float(np.linalg.norm(op(x) - theta * x) / norm)


def _grow(basis: np.ndarray, steps: int) -> np.ndarray:
    """Reallocate the Krylov basis with twice the rows, capped at the step limit."""
    rows = min(2 * basis.shape[0], steps)
    grown = np.zeros((rows, basis.shape[1]))
    grown[: basis.shape[0]] = basis
    return grown
