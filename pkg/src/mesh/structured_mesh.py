from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple
import logging

import numpy as np

logger = logging.getLogger(__name__)

DIAGONALS = ("lower_left", "lower_right")


@dataclass(frozen=True)
class MeshConfig:
    """
    Size of the structured decomposition of the unit square.

    Args:
        N: subdomains per side (N = 1/H)
        m: elements per subdomain side (m = H/h)
        diagonal: "lower_left" splits every cell along the lower-left to
                  upper-right diagonal, "lower_right" along the other one
    """

    N: int
    m: int
    diagonal: str = "lower_left"

    def __post_init__(self):
        for name in ("N", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
        if self.diagonal not in DIAGONALS:
            raise ValueError(f"Unknown diagonal orientation '{self.diagonal}', expected one of {DIAGONALS}")

    @property
    def cells_per_side(self) -> int:
        return self.N * self.m

    @property
    def H(self) -> Fraction:
        return Fraction(1, self.N)

    @property
    def h(self) -> Fraction:
        return Fraction(1, self.N * self.m)


@dataclass(frozen=True, eq=False)
class StructuredMesh:
    """Uniform right-triangle mesh of (0,1)^2 decomposed into N x N square subdomains."""

    config: MeshConfig
    node_grid: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    triangles: np.ndarray = field(repr=False)
    subdomain_of_triangle: np.ndarray = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return self.node_grid.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def num_subdomains(self) -> int:
        return self.config.N ** 2

    def node_index(self, ix: int, iy: int) -> int:
        """Row-major index of the grid node (ix, iy)."""
        return iy * (self.config.cells_per_side + 1) + ix

    def subdomain_position(self, j: int) -> Tuple[int, int]:
        """(sx, sy) position of subdomain j in the N x N subdomain grid."""
        N = self.config.N
        if not 0 <= j < N * N:
            raise ValueError(f"Subdomain index {j} out of range for N={N}")
        return j % N, j // N

    def subdomain_index(self, sx: int, sy: int) -> int:
        return sy * self.config.N + sx

    def subdomain_nodes(self, j: int) -> np.ndarray:
        """Sorted node indices of the closure of subdomain j."""
        sx, sy = self.subdomain_position(j)
        m = self.config.m
        ix = np.arange(sx * m, (sx + 1) * m + 1)
        iy = np.arange(sy * m, (sy + 1) * m + 1)
        grid_x, grid_y = np.meshgrid(ix, iy)
        return (grid_y * (self.config.cells_per_side + 1) + grid_x).ravel()

    def subdomain_triangles(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.subdomain_of_triangle == j)

    def boundary_edge_count(self, j: int) -> int:
        """Number of edges of subdomain j lying on the boundary of the unit square."""
        sx, sy = self.subdomain_position(j)
        last = self.config.N - 1
        return int(sx == 0) + int(sx == last) + int(sy == 0) + int(sy == last)


def build_mesh(cfg: MeshConfig) -> StructuredMesh:
    """
    Build the structured triangulation for a mesh configuration.

    Nodes are numbered row-major (x fastest). Every cell contributes two
    triangles listed with the right-angle vertex first and counterclockwise.

    Args:
        cfg: mesh configuration

    Returns:
        The StructuredMesh
    """
    if not isinstance(cfg, MeshConfig):
        raise ValueError(f"Expected a MeshConfig, got {type(cfg).__name__}")

    n = cfg.cells_per_side
    ix, iy = np.meshgrid(np.arange(n + 1), np.arange(n + 1))
    node_grid = np.column_stack((ix.ravel(), iy.ravel())).astype(np.int64)
    nodes = node_grid / float(n)

    cx, cy = np.meshgrid(np.arange(n), np.arange(n))
    cx = cx.ravel()
    cy = cy.ravel()
    lower_left = cy * (n + 1) + cx
    lower_right = lower_left + 1
    upper_left = lower_left + (n + 1)
    upper_right = upper_left + 1

    if cfg.diagonal == "lower_left":
        first = np.column_stack((lower_right, upper_right, lower_left))
        second = np.column_stack((upper_left, lower_left, upper_right))
    else:
        first = np.column_stack((lower_left, lower_right, upper_left))
        second = np.column_stack((upper_right, upper_left, lower_right))

    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = first
    triangles[1::2] = second

    cell_subdomain = (cy // cfg.m) * cfg.N + (cx // cfg.m)
    subdomain_of_triangle = np.repeat(cell_subdomain, 2)

    for array in (node_grid, nodes, triangles, subdomain_of_triangle):
        array.setflags(write=False)

    logger.debug(f"Built mesh N={cfg.N} m={cfg.m}: {node_grid.shape[0]} nodes, {triangles.shape[0]} triangles")
    return StructuredMesh(
        config=cfg,
        node_grid=node_grid,
        nodes=nodes,
        triangles=triangles,
        subdomain_of_triangle=subdomain_of_triangle,
    )
