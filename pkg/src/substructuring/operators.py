from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional
import logging

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from errors import ConvergenceError, DimensionError, SolverBreakdownError
from mesh.structured_mesh import StructuredMesh
from mesh.dof_partition import DofPartition
from assembly.split_function import SplitFunction
from assembly.stiffness import BlockStiffness
from substructuring.factorization import SymmetricFactor
from substructuring.krylov import CG_CAP_FACTOR, conjugate_gradient

logger = logging.getLogger(__name__)

# Largest dual dimension for which dense S or F are formed
DENSE_CAP = 4096
INNER_TOL = 1e-12
INNER_SOLVERS = ("cg", "direct")
MAX_REFINEMENT_STEPS = 3


def _as_vector(values, size: int, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (size,):
        raise DimensionError(f"{what} needs shape ({size},), got {values.shape}")
    return values


def _relative(residual: np.ndarray, reference: np.ndarray) -> float:
    scale = np.linalg.norm(reference)
    return float(np.linalg.norm(residual) / scale) if scale > 0 else float(np.linalg.norm(residual))


def _refined_solve(factor: SymmetricFactor, matrix, rhs: np.ndarray) -> np.ndarray:
    x = factor.solve(rhs)
    for _ in range(MAX_REFINEMENT_STEPS):
        residual = rhs - matrix @ x
        if _relative(residual, rhs) <= INNER_TOL:
            return x
        x = x + factor.solve(residual)
    achieved = _relative(rhs - matrix @ x, rhs)
    if achieved > INNER_TOL:
        raise SolverBreakdownError(
            f"Refined solve with {factor.name} stalled at relative residual {achieved:.3e}"
        )
    return x


def harmonic_extension(blocks: BlockStiffness, v_dual, factor: Optional[SymmetricFactor] = None) -> SplitFunction:
    """
    Discrete harmonic extension of subdomain-local dual values.

    Interior and corner values solve A_rr v_r = -A_rd v_dual, which makes the
    result the minimal energy function with the given dual values.

    Args:
        blocks: assembled broken stiffness
        v_dual: values on the subdomain-local dual DOFs
        factor: factorization of A_rr to reuse (built when None)

    Returns:
        SplitFunction with the given dual part
    """
    part = blocks.partition
    v_dual = _as_vector(v_dual, part.num_local_dual, "Dual values")
    if factor is None:
        factor = SymmetricFactor(blocks.A_rr, "A_rr")

    rhs = -(blocks.A_rd @ v_dual)
    v_r = _refined_solve(factor, blocks.A_rr, rhs)
    n_i = part.num_interior
    return SplitFunction(part, v_r[:n_i], v_r[n_i:], v_dual.copy())


class SchurOperator:
    """
    Schur complement S = A_dd - A_dr A_rr^{-1} A_rd onto the subdomain-local dual DOFs.

    A_rr is factorized once at construction and reused by every application.
    """

    def __init__(self, blocks: BlockStiffness):
        self.blocks = blocks
        self.factor = SymmetricFactor(blocks.A_rr, "A_rr")
        self._A_dr = blocks.A_dr

    @property
    def dim(self) -> int:
        return self.blocks.num_local_dual

    @cached_property
    def full_factor(self) -> SymmetricFactor:
        """Factorization of the partially assembled matrix; the dual block of its inverse is S^{-1}."""
        return SymmetricFactor(self.blocks.K_tilde, "K_tilde")

    def apply(self, v_dual) -> np.ndarray:
        v_dual = _as_vector(v_dual, self.dim, "Dual values")
        return self.blocks.A_dd @ v_dual - self._A_dr @ self.factor.solve(self.blocks.A_rd @ v_dual)

    def extend(self, v_dual) -> SplitFunction:
        return harmonic_extension(self.blocks, v_dual, factor=self.factor)

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_CAP:
            raise ValueError(f"Dense S requested for dual dimension {self.dim} above the cap {DENSE_CAP}")
        coupling = self.blocks.A_rd.toarray()
        return self.blocks.A_dd.toarray() - coupling.T @ self.factor.solve(coupling)

    def solve(self, g, method: str = "cg", tol: float = INNER_TOL) -> np.ndarray:
        """
        Apply S^{-1} to g.

        Args:
            g: dual right-hand side
            method: "cg" iterates on S, "direct" uses the partially assembled factorization
            tol: relative residual target

        Returns:
            x with ||S x - g|| <= tol ||g||
        """
        g = _as_vector(g, self.dim, "Dual right-hand side")
        if method == "cg":
            result = conjugate_gradient(self.apply, g, tol=tol, maxiter=CG_CAP_FACTOR * max(self.dim, 1))
            return result.x
        if method != "direct":
            raise ValueError(f"Unknown inner solver '{method}', expected one of {INNER_SOLVERS}")

        n_r = self.blocks.num_primal
        x = np.zeros(self.dim)
        residual = g.copy()
        for _ in range(MAX_REFINEMENT_STEPS + 1):
            if _relative(residual, g) <= tol:
                return x
            x = x + self.full_factor.solve(np.concatenate((np.zeros(n_r), residual)))[n_r:]
            residual = g - self.apply(x)
        achieved = _relative(residual, g)
        if achieved > tol:
            raise ConvergenceError(
                f"Direct Schur solve stalled at relative residual {achieved:.3e}",
                iterations=MAX_REFINEMENT_STEPS,
                residual=achieved,
            )
        return x


def schur_apply(S: SchurOperator, v_dual) -> np.ndarray:
    return S.apply(v_dual)


def schur_dense(S: SchurOperator) -> np.ndarray:
    return S.dense()


@dataclass(frozen=True, eq=False)
class JumpOperator:
    """
    Signed incidence matrix B_Delta: one row per global dual node, +1 on the
    lower-numbered owning subdomain's copy and -1 on the higher one.
    """

    partition: DofPartition = field(repr=False)
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_cols(self) -> int:
        return self.matrix.shape[1]

    def apply(self, v_dual) -> np.ndarray:
        return self.matrix @ _as_vector(v_dual, self.num_cols, "Dual values")

    def transpose_apply(self, lam) -> np.ndarray:
        return self.matrix.T @ _as_vector(lam, self.num_rows, "Multiplier")

    def flip_rows(self, rows: Iterable[int]) -> "JumpOperator":
        """Copy of the operator with the given rows negated."""
        signs = np.ones(self.num_rows)
        signs[np.asarray(list(rows), dtype=np.int64)] = -1.0
        return JumpOperator(self.partition, (sp.diags(signs) @ self.matrix).tocsr())


def jump_operator(mesh: StructuredMesh, part: DofPartition) -> JumpOperator:
    """
    Build B_Delta for a partition.

    Args:
        mesh: structured mesh
        part: its DOF partition

    Returns:
        JumpOperator of shape (num_dual, num_local_dual)
    """
    if part.mesh is not mesh:
        raise ValueError("Partition was not built from this mesh")

    n_dual = part.num_dual
    lower = [part.local_dual_index[(int(j), int(g))] for g, (j, _) in zip(part.dual, part.dual_owners)]
    upper = [part.local_dual_index[(int(k), int(g))] for g, (_, k) in zip(part.dual, part.dual_owners)]
    rows = np.concatenate((np.arange(n_dual), np.arange(n_dual)))
    cols = np.asarray(lower + upper, dtype=np.int64)
    values = np.concatenate((np.ones(n_dual), -np.ones(n_dual)))
    matrix = sp.coo_matrix((values, (rows, cols)), shape=(n_dual, part.num_local_dual)).tocsr()
    matrix.sort_indices()
    return JumpOperator(part, matrix)


class DualOperator:
    """
    FETI-DP dual operator F = B_Delta S^{-1} B_Delta^T on the multiplier space.

    Args:
        schur: Schur complement operator
        jump: jump operator on the same partition
        inner: "cg" or "direct" inner solve for S^{-1}
        tol: relative residual target of the inner solve
    """

    def __init__(self, schur: SchurOperator, jump: JumpOperator, inner: str = "cg", tol: float = INNER_TOL):
        if inner not in INNER_SOLVERS:
            raise ValueError(f"Unknown inner solver '{inner}', expected one of {INNER_SOLVERS}")
        if jump.partition is not schur.blocks.partition:
            raise ValueError("Jump and Schur operators belong to different partitions")
        self.schur = schur
        self.jump = jump
        self.inner = inner
        self.tol = tol

    @property
    def dim(self) -> int:
        return self.jump.num_rows

    def apply(self, lam) -> np.ndarray:
        lam = _as_vector(lam, self.dim, "Multiplier")
        return self.jump.apply(self.schur.solve(self.jump.transpose_apply(lam), method=self.inner, tol=self.tol))

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_CAP:
            raise ValueError(f"Dense F requested for dimension {self.dim} above the cap {DENSE_CAP}")
        B = self.jump.matrix.toarray()
        return B @ la.solve(self.schur.dense(), B.T, assume_a="pos")


def dual_apply(F: DualOperator, lam) -> np.ndarray:
    return F.apply(lam)
