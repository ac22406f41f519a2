import logging

import numpy as np
import scipy.sparse as sp

from errors import DimensionError
from mesh.structured_mesh import StructuredMesh
from mesh.dof_partition import DofPartition
from assembly.split_function import SplitFunction

logger = logging.getLogger(__name__)


def coarse_interpolation_matrix(mesh: StructuredMesh) -> sp.csr_matrix:
    """
    Matrix of the piecewise linear coarse interpolation on the subdomain mesh.

    Every subdomain square is split along the same diagonal as the fine cells,
    so the coarse space is nested in the fine one. Row i holds the barycentric
    weights of fine node i with respect to its coarse triangle's vertices.

    Args:
        mesh: structured mesh

    Returns:
        CSR matrix P with (I^H v) = P v on all nodes
    """
    cfg = mesh.config
    N, m = cfg.N, cfg.m
    ix = mesh.node_grid[:, 0]
    iy = mesh.node_grid[:, 1]

    cx = np.minimum(ix // m, N - 1)
    cy = np.minimum(iy // m, N - 1)
    xi = (ix - cx * m) / m
    eta = (iy - cy * m) / m

    v00 = mesh.node_index(cx * m, cy * m)
    v10 = mesh.node_index((cx + 1) * m, cy * m)
    v01 = mesh.node_index(cx * m, (cy + 1) * m)
    v11 = mesh.node_index((cx + 1) * m, (cy + 1) * m)

    if cfg.diagonal == "lower_left":
        below = xi >= eta
        vertices = np.where(
            below[:, None],
            np.column_stack((v00, v10, v11)),
            np.column_stack((v00, v01, v11)),
        )
        weights = np.where(
            below[:, None],
            np.column_stack((1 - xi, xi - eta, eta)),
            np.column_stack((1 - eta, eta - xi, xi)),
        )
    else:
        below = xi + eta <= 1
        vertices = np.where(
            below[:, None],
            np.column_stack((v00, v10, v01)),
            np.column_stack((v11, v01, v10)),
        )
        weights = np.where(
            below[:, None],
            np.column_stack((1 - xi - eta, xi, eta)),
            np.column_stack((xi + eta - 1, 1 - xi, 1 - eta)),
        )

    rows = np.repeat(np.arange(mesh.num_nodes), 3)
    matrix = sp.coo_matrix((weights.ravel(), (rows, vertices.ravel())), shape=(mesh.num_nodes, mesh.num_nodes)).tocsr()
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    return matrix


def coarse_interpolation(mesh: StructuredMesh, v) -> np.ndarray:
    """
    Coarse interpolant I^H v evaluated at every fine node.

    Args:
        mesh: structured mesh
        v: nodal values on all nodes (boundary included)

    Returns:
        Nodal values of I^H v
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (mesh.num_nodes,):
        raise DimensionError(f"Expected {mesh.num_nodes} nodal values, got shape {v.shape}")
    return coarse_interpolation_matrix(mesh) @ v


def coarse_interpolation_split(mesh: StructuredMesh, part: DofPartition, v: SplitFunction) -> SplitFunction:
    """
    Coarse interpolant of a broken function.

    Only subdomain vertices enter I^H: the corners carry single values and the
    boundary vertices are Dirichlet, so the result is continuous.
    """
    if v.partition is not part or part.mesh is not mesh:
        raise DimensionError("Split function does not belong to this mesh and partition")
    vertex_values = np.zeros(mesh.num_nodes)
    vertex_values[part.corners] = v.corner
    return SplitFunction.from_nodal(part, coarse_interpolation(mesh, vertex_values))
