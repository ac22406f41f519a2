from dataclasses import dataclass, field
from typing import List
import logging

import numpy as np
import scipy.sparse as sp

from errors import DimensionError
from mesh.structured_mesh import StructuredMesh
from mesh.dof_partition import DofPartition
from assembly.split_function import SplitFunction

logger = logging.getLogger(__name__)

# Relative area threshold below which a triangle counts as degenerate
DEGENERATE_AREA_TOL = 1e-14


def _gradient_coefficients(coords: np.ndarray):
    x = coords[..., 0]
    y = coords[..., 1]
    b = np.stack((y[..., 1] - y[..., 2], y[..., 2] - y[..., 0], y[..., 0] - y[..., 1]), axis=-1)
    c = np.stack((x[..., 2] - x[..., 1], x[..., 0] - x[..., 2], x[..., 1] - x[..., 0]), axis=-1)
    area2 = (x[..., 1] - x[..., 0]) * (y[..., 2] - y[..., 0]) - (x[..., 2] - x[..., 0]) * (y[..., 1] - y[..., 0])
    return b, c, area2


def element_stiffness(coords: np.ndarray) -> np.ndarray:
    """
    P1 Laplacian element matrices for a stack of triangles.

    Args:
        coords: array of shape (T, 3, 2) with the vertex coordinates of T triangles

    Returns:
        Array of shape (T, 3, 3) with entries int_T grad(phi_a) . grad(phi_b)
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 3 or coords.shape[1:] != (3, 2):
        raise ValueError(f"Expected triangle coordinates of shape (T, 3, 2), got {coords.shape}")

    b, c, area2 = _gradient_coefficients(coords)
    extent = np.ptp(coords, axis=1).max(axis=-1)
    degenerate = np.abs(area2) <= DEGENERATE_AREA_TOL * np.maximum(extent, np.finfo(float).tiny) ** 2
    if np.any(degenerate):
        raise ValueError(f"Degenerate triangle (zero area) at position {int(np.flatnonzero(degenerate)[0])}")

    outer = b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]
    return outer / (2.0 * np.abs(area2))[:, None, None]


def local_stiffness(tri) -> np.ndarray:
    """
    Element stiffness matrix of a single triangle.

    Args:
        tri: the three vertices as a (3, 2) array-like

    Returns:
        Symmetric 3x3 matrix with zero row sums
    """
    tri = np.asarray(tri, dtype=float)
    if tri.shape != (3, 2):
        raise ValueError(f"Expected a (3, 2) array of vertices, got shape {tri.shape}")
    return element_stiffness(tri[None])[0]


def _element_pattern(local: np.ndarray):
    rows = np.broadcast_to(local[:, :, None], local.shape + (3,)).ravel()
    cols = np.broadcast_to(local[:, None, :], local.shape[:1] + (3, 3)).ravel()
    return rows, cols


def _to_csr(values, rows, cols, shape) -> sp.csr_matrix:
    matrix = sp.coo_matrix((values, (rows, cols)), shape=shape).tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


@dataclass(frozen=True, eq=False)
class BlockStiffness:
    """
    Sparse blocks of the broken form a~ over a DofPartition.

    The broken vector layout is [interior | corners | local dual]; the first two
    groups form the r set, where corners are shared by their four subdomains.
    """

    partition: DofPartition = field(repr=False)
    K_tilde: sp.csr_matrix = field(repr=False)
    A_rr: sp.csr_matrix = field(repr=False)
    A_rd: sp.csr_matrix = field(repr=False)
    A_dd: sp.csr_matrix = field(repr=False)
    local_matrices: List[sp.csr_matrix] = field(repr=False)

    @property
    def mesh(self) -> StructuredMesh:
        return self.partition.mesh

    @property
    def A_dr(self) -> sp.csr_matrix:
        return self.A_rd.T.tocsr()

    @property
    def num_primal(self) -> int:
        return self.A_rr.shape[0]

    @property
    def num_local_dual(self) -> int:
        return self.A_dd.shape[0]

    def _broken(self, v: SplitFunction) -> np.ndarray:
        if not isinstance(v, SplitFunction):
            raise DimensionError(f"Expected a SplitFunction, got {type(v).__name__}")
        if v.partition is not self.partition:
            raise DimensionError("Split function is dimensioned to a different partition")
        return v.to_broken()


def assemble_blocks(mesh: StructuredMesh, part: DofPartition) -> BlockStiffness:
    """
    Assemble the broken stiffness form subdomain by subdomain.

    Dirichlet nodes are dropped, every dual node gets one column per owning
    subdomain and every corner stays a single column.

    Args:
        mesh: structured mesh
        part: its DOF partition

    Returns:
        BlockStiffness with A_rr, A_rd, A_dd and the local Neumann matrices
    """
    if part.mesh is not mesh:
        raise ValueError("Partition was not built from this mesh")

    n_r = part.num_primal
    size = n_r + part.num_local_dual
    values, rows, cols = [], [], []
    local_matrices = []

    for j in range(mesh.num_subdomains):
        closure = mesh.subdomain_nodes(j)
        broken = part.subdomain_broken_index(j)
        triangles = mesh.triangles[mesh.subdomain_triangles(j)]
        local = np.searchsorted(closure, triangles)
        element = element_stiffness(mesh.node_grid[triangles]).ravel()

        local_rows, local_cols = _element_pattern(local)
        local_matrices.append(_to_csr(element, local_rows, local_cols, (closure.size, closure.size)))

        global_rows = broken[local_rows]
        global_cols = broken[local_cols]
        keep = (global_rows >= 0) & (global_cols >= 0)
        values.append(element[keep])
        rows.append(global_rows[keep])
        cols.append(global_cols[keep])

    K_tilde = _to_csr(np.concatenate(values), np.concatenate(rows), np.concatenate(cols), (size, size))
    blocks = BlockStiffness(
        partition=part,
        K_tilde=K_tilde,
        A_rr=K_tilde[:n_r, :n_r].tocsr(),
        A_rd=K_tilde[:n_r, n_r:].tocsr(),
        A_dd=K_tilde[n_r:, n_r:].tocsr(),
        local_matrices=local_matrices,
    )
    logger.info(
        f"Assembled N={mesh.config.N} m={mesh.config.m}: r={n_r} local dual={part.num_local_dual} "
        f"nnz={K_tilde.nnz}"
    )
    return blocks


def free_nodes(mesh: StructuredMesh) -> np.ndarray:
    """Row-major indices of the nodes off the boundary of the unit square."""
    n = mesh.config.cells_per_side
    ix = mesh.node_grid[:, 0]
    iy = mesh.node_grid[:, 1]
    return np.flatnonzero((ix > 0) & (ix < n) & (iy > 0) & (iy < n))


def assemble_global(mesh: StructuredMesh, dirichlet: bool = True) -> sp.csr_matrix:
    """
    Standard continuous P1 stiffness matrix on the whole mesh.

    Args:
        mesh: structured mesh
        dirichlet: drop the boundary rows and columns (ordered by free_nodes)

    Returns:
        CSR matrix
    """
    element = element_stiffness(mesh.node_grid[mesh.triangles]).ravel()
    rows, cols = _element_pattern(mesh.triangles)
    matrix = _to_csr(element, rows, cols, (mesh.num_nodes, mesh.num_nodes))
    if dirichlet:
        free = free_nodes(mesh)
        matrix = matrix[free][:, free].tocsr()
    return matrix


def bilinear(blocks: BlockStiffness, u: SplitFunction, v: SplitFunction) -> float:
    """a~(u, v) for two split functions on the same partition."""
    x = blocks._broken(u)
    y = blocks._broken(v)
    return float(x @ (blocks.K_tilde @ y))


def energy(blocks: BlockStiffness, v: SplitFunction) -> float:
    """a~(v, v), clipped at zero against roundoff."""
    x = blocks._broken(v)
    return max(float(x @ (blocks.K_tilde @ x)), 0.0)


def energy_subdomain(blocks: BlockStiffness, v: SplitFunction, j: int) -> float:
    """Energy of v restricted to subdomain j."""
    blocks._broken(v)
    if not 0 <= j < len(blocks.local_matrices):
        raise ValueError(f"Subdomain index {j} out of range")
    values = v.subdomain_values(j)
    return max(float(values @ (blocks.local_matrices[j] @ values)), 0.0)
