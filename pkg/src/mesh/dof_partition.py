from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Tuple
import logging

import numpy as np

from mesh.structured_mesh import StructuredMesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InterfaceEdge:
    """Open interface edge shared by subdomains j < k, with its dual nodes in grid order."""

    j: int
    k: int
    nodes: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class DofPartition:
    """
    Classification of mesh nodes into Dirichlet, interior, dual and primal-corner sets.

    Subdomain-local dual columns are ordered by owning subdomain first and
    node index second, so the dual blocks are block diagonal per subdomain.
    """

    mesh: StructuredMesh = field(repr=False)
    boundary: np.ndarray = field(repr=False)
    corners: np.ndarray = field(repr=False)
    dual: np.ndarray = field(repr=False)
    dual_owners: np.ndarray = field(repr=False)
    interior: List[np.ndarray] = field(repr=False)
    local_dual_subdomain: np.ndarray = field(repr=False)
    local_dual_node: np.ndarray = field(repr=False)
    local_dual_index: Dict[Tuple[int, int], int] = field(repr=False)
    edge_list: List[InterfaceEdge] = field(repr=False)

    @property
    def num_corners(self) -> int:
        return self.corners.size

    @property
    def num_dual(self) -> int:
        return self.dual.size

    @property
    def num_local_dual(self) -> int:
        return self.local_dual_node.size

    @property
    def interior_nodes(self) -> np.ndarray:
        """Interior nodes of all subdomains, concatenated in subdomain order."""
        if not self.interior:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(self.interior)

    @property
    def num_interior(self) -> int:
        return sum(block.size for block in self.interior)

    @property
    def primal_nodes(self) -> np.ndarray:
        """The r = interior + corner node ordering used by the assembled blocks."""
        return np.concatenate((self.interior_nodes, self.corners))

    @property
    def num_primal(self) -> int:
        return self.num_interior + self.num_corners

    @cached_property
    def primal_position(self) -> np.ndarray:
        """Position of every node in the r ordering, -1 for dual and Dirichlet nodes."""
        position = np.full(self.mesh.num_nodes, -1, dtype=np.int64)
        position[self.primal_nodes] = np.arange(self.num_primal)
        return position

    def local_dual_range(self, j: int) -> np.ndarray:
        """Local dual columns owned by subdomain j."""
        return np.flatnonzero(self.local_dual_subdomain == j)

    def subdomain_broken_index(self, j: int) -> np.ndarray:
        """
        Broken-vector positions of the closure nodes of subdomain j.

        The broken vector is laid out as [interior | corners | local dual];
        Dirichlet nodes map to -1.
        """
        closure = self.mesh.subdomain_nodes(j)
        index = self.primal_position[closure].copy()
        columns = self.local_dual_range(j)
        index[np.searchsorted(closure, self.local_dual_node[columns])] = self.num_primal + columns
        return index

    def dual_trace(self, values: np.ndarray) -> np.ndarray:
        """Subdomain-local dual values of a globally continuous nodal function."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.mesh.num_nodes,):
            raise ValueError(f"Expected {self.mesh.num_nodes} nodal values, got shape {values.shape}")
        return values[self.local_dual_node]


def _owners_along_axis(index: np.ndarray, m: int, on_line: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    upper = index // m
    lower = np.where(on_line, upper - 1, upper)
    return lower, upper


def classify_dofs(mesh: StructuredMesh) -> DofPartition:
    """
    Classify every node of a structured mesh.

    Args:
        mesh: structured mesh

    Returns:
        DofPartition with boundary, corner, dual and per-subdomain interior sets
    """
    cfg = mesh.config
    N, m, n = cfg.N, cfg.m, cfg.cells_per_side
    ix = mesh.node_grid[:, 0]
    iy = mesh.node_grid[:, 1]

    on_boundary = (ix == 0) | (ix == n) | (iy == 0) | (iy == n)
    on_vertical = ix % m == 0
    on_horizontal = iy % m == 0
    is_corner = on_vertical & on_horizontal & ~on_boundary
    is_dual = (on_vertical | on_horizontal) & ~is_corner & ~on_boundary
    is_interior = ~(on_vertical | on_horizontal) & ~on_boundary

    boundary = np.flatnonzero(on_boundary)
    corners = np.flatnonzero(is_corner)
    dual = np.flatnonzero(is_dual)

    interior_nodes = np.flatnonzero(is_interior)
    interior_subdomain = (iy[interior_nodes] // m) * N + ix[interior_nodes] // m
    interior = [interior_nodes[interior_subdomain == j] for j in range(N * N)]

    # A dual node sits on exactly one interface line, so only one axis splits its owners.
    dx, dy = ix[dual], iy[dual]
    vertical = dx % m == 0
    sx_low, sx_high = _owners_along_axis(dx, m, vertical)
    sy_low, sy_high = _owners_along_axis(dy, m, ~vertical)
    dual_owners = np.column_stack((sy_low * N + sx_low, sy_high * N + sx_high))

    local_subdomain = np.concatenate((dual_owners[:, 0], dual_owners[:, 1]))
    local_node = np.concatenate((dual, dual))
    order = np.lexsort((local_node, local_subdomain))
    local_dual_subdomain = local_subdomain[order]
    local_dual_node = local_node[order]
    local_dual_index = {
        (int(j), int(g)): column
        for column, (j, g) in enumerate(zip(local_dual_subdomain, local_dual_node))
    }

    edge_list = []
    if dual.size:
        pair_order = np.lexsort((dual, dual_owners[:, 1], dual_owners[:, 0]))
        sorted_pairs = dual_owners[pair_order]
        sorted_nodes = dual[pair_order]
        breaks = np.flatnonzero(np.any(np.diff(sorted_pairs, axis=0) != 0, axis=1)) + 1
        for start, stop in zip(np.r_[0, breaks], np.r_[breaks, dual.size]):
            j, k = sorted_pairs[start]
            edge_list.append(InterfaceEdge(j=int(j), k=int(k), nodes=sorted_nodes[start:stop]))

    partition = DofPartition(
        mesh=mesh,
        boundary=boundary,
        corners=corners,
        dual=dual,
        dual_owners=dual_owners,
        interior=interior,
        local_dual_subdomain=local_dual_subdomain,
        local_dual_node=local_dual_node,
        local_dual_index=local_dual_index,
        edge_list=edge_list,
    )
    logger.debug(
        f"Classified N={N} m={m}: {boundary.size} boundary, {corners.size} corners, "
        f"{dual.size} dual, {partition.num_interior} interior"
    )
    return partition
