import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from errors import SolverBreakdownError

logger = logging.getLogger(__name__)

SPLU_OPTIONS = dict(DiagPivotThresh=0.0, SymmetricMode=True)


class SymmetricFactor:
    """
    Sparse factorization of a symmetric positive definite matrix.

    SuperLU runs in symmetric mode with a symmetric minimum-degree ordering and
    no threshold pivoting, so the factorization keeps the diagonal pivots of an
    LDL^T and a non-positive pivot exposes a matrix that is not SPD.
    """

    def __init__(self, matrix, name: str = "matrix"):
        self.name = name
        matrix = sp.csc_matrix(matrix, dtype=float)
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"{name} must be square, got shape {matrix.shape}")
        self.shape = matrix.shape
        self._lu = None
        if self.shape[0] == 0:
            return

        try:
            lu = spla.splu(matrix, permc_spec="MMD_AT_PLUS_A", options=SPLU_OPTIONS)
        except RuntimeError as e:
            raise SolverBreakdownError(f"Factorization of {name} failed: {e}") from e

        pivots = lu.U.diagonal()
        if not np.all(pivots > 0):
            worst = float(pivots.min())
            raise SolverBreakdownError(f"{name} is not positive definite (pivot {worst:.3e})")

        self._lu = lu
        logger.debug(
            f"Factorized {name}: n={self.shape[0]} nnz(L+U)={lu.L.nnz + lu.U.nnz} "
            f"pivot range [{pivots.min():.3e}, {pivots.max():.3e}]"
        )

    @property
    def size(self) -> int:
        return self.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for one right-hand side vector or a (n, k) block of them."""
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.size:
            raise ValueError(f"{self.name} solve needs {self.size} rows, got shape {rhs.shape}")
        if self._lu is None or rhs.size == 0:
            return np.zeros_like(rhs)
        return self._lu.solve(np.ascontiguousarray(rhs))
