from dataclasses import dataclass
from typing import Dict
import logging
import math

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from mesh.structured_mesh import MeshConfig, StructuredMesh, build_mesh
from assembly.stiffness import assemble_global
from substructuring.coarse import coarse_interpolation_matrix

logger = logging.getLogger(__name__)


@dataclass
class PoincareReport:
    m: int
    c_star: float
    ratio_log: float
    vanish_at_vertices: bool = False

    def as_row(self) -> Dict[str, object]:
        return {"m": self.m, "c_star": self.c_star, "ratio_log": self.ratio_log}


def boundary_mass(mesh: StructuredMesh) -> sp.csr_matrix:
    """
    Exact P1 mass matrix of the trace on the boundary of the unit square.

    Each boundary edge of length h contributes h/6 [[2, 1], [1, 2]].
    """
    n = mesh.config.cells_per_side
    h = 1.0 / n
    steps = np.arange(n)
    edges = np.concatenate((
        np.column_stack((mesh.node_index(steps, 0), mesh.node_index(steps + 1, 0))),
        np.column_stack((mesh.node_index(steps, n), mesh.node_index(steps + 1, n))),
        np.column_stack((mesh.node_index(0, steps), mesh.node_index(0, steps + 1))),
        np.column_stack((mesh.node_index(n, steps), mesh.node_index(n, steps + 1))),
    ))
    local = (h / 6.0) * np.array([[2.0, 1.0], [1.0, 2.0]])
    rows = np.repeat(edges, 2, axis=1).ravel()
    cols = np.tile(edges, (1, 2)).ravel()
    values = np.tile(local.ravel(), edges.shape[0])
    matrix = sp.coo_matrix((values, (rows, cols)), shape=(mesh.num_nodes, mesh.num_nodes)).tocsr()
    matrix.sum_duplicates()
    return matrix


def subdomain_vertices(mesh: StructuredMesh) -> np.ndarray:
    n = mesh.config.cells_per_side
    return np.array([mesh.node_index(0, 0), mesh.node_index(n, 0), mesh.node_index(0, n), mesh.node_index(n, n)])


def poincare_constant(m: int, vanish_at_vertices: bool = False) -> PoincareReport:
    """
    Sharp constant of the boundary estimate for the coarse interpolation error
    on one square subdomain:

        ||v - I^H v||^2_{L2(boundary)} <= c* H |v|^2_{H1}

    computed as the largest generalized eigenvalue of the pencil (Q, K) with
    constants deflated.

    Args:
        m: elements per subdomain side, m >= 2
        vanish_at_vertices: restrict to functions vanishing at the four
                            subdomain vertices (then I^H v = 0)

    Returns:
        PoincareReport
    """
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 2:
        raise ValueError(f"The interpolation constant needs an integer m >= 2, got {m!r}")

    mesh = build_mesh(MeshConfig(1, m))
    H = float(mesh.config.H)
    K = assemble_global(mesh, dirichlet=False).toarray()
    M = boundary_mass(mesh).toarray()

    if vanish_at_vertices:
        free = np.setdiff1d(np.arange(mesh.num_nodes), subdomain_vertices(mesh))
        K_reduced = K[np.ix_(free, free)]
        Q_reduced = M[np.ix_(free, free)] / H
    else:
        error = np.eye(mesh.num_nodes) - coarse_interpolation_matrix(mesh).toarray()
        Q = error.T @ M @ error / H
        deflation = la.null_space(np.ones((1, mesh.num_nodes)))
        K_reduced = deflation.T @ K @ deflation
        Q_reduced = deflation.T @ Q @ deflation

    size = K_reduced.shape[0]
    c_star = float(la.eigh(Q_reduced, K_reduced, eigvals_only=True, subset_by_index=[size - 1, size - 1])[0])
    report = PoincareReport(m=m, c_star=c_star, ratio_log=c_star / (1.0 + math.log(m)),
                            vanish_at_vertices=vanish_at_vertices)
    logger.info(f"Interpolation constant m={m}{' (vertex-vanishing)' if vanish_at_vertices else ''}: c*={c_star:.12g}")
    return report
