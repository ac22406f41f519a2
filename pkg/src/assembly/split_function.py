from dataclasses import dataclass
import logging

import numpy as np

from errors import DimensionError
from mesh.dof_partition import DofPartition

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class SplitFunction:
    """
    Finite element coefficients split as v = v_I + v_c + v_Delta over a DofPartition.

    Args:
        partition: the partition the components are dimensioned to
        interior: values on interior nodes, in DofPartition.interior_nodes order
        corner: values on the primal corners (single valued)
        dual: subdomain-local dual values (possibly discontinuous across the interface)
    """

    partition: DofPartition
    interior: np.ndarray
    corner: np.ndarray
    dual: np.ndarray

    def __post_init__(self):
        expected = {
            "interior": self.partition.num_interior,
            "corner": self.partition.num_corners,
            "dual": self.partition.num_local_dual,
        }
        for name, size in expected.items():
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != (size,):
                raise DimensionError(f"{name} component needs shape ({size},), got {values.shape}")
            setattr(self, name, values)

    @classmethod
    def zeros(cls, partition: DofPartition) -> "SplitFunction":
        return cls(
            partition,
            np.zeros(partition.num_interior),
            np.zeros(partition.num_corners),
            np.zeros(partition.num_local_dual),
        )

    @classmethod
    def from_broken(cls, partition: DofPartition, vector: np.ndarray) -> "SplitFunction":
        """Split a broken vector laid out as [interior | corners | local dual]."""
        vector = np.asarray(vector, dtype=float)
        size = partition.num_primal + partition.num_local_dual
        if vector.shape != (size,):
            raise DimensionError(f"Broken vector needs shape ({size},), got {vector.shape}")
        n_i = partition.num_interior
        n_r = partition.num_primal
        return cls(partition, vector[:n_i].copy(), vector[n_i:n_r].copy(), vector[n_r:].copy())

    @classmethod
    def from_nodal(cls, partition: DofPartition, values: np.ndarray) -> "SplitFunction":
        """Split a globally continuous nodal function (Dirichlet values are ignored)."""
        values = np.asarray(values, dtype=float)
        if values.shape != (partition.mesh.num_nodes,):
            raise DimensionError(f"Expected {partition.mesh.num_nodes} nodal values, got shape {values.shape}")
        return cls(
            partition,
            values[partition.interior_nodes],
            values[partition.corners],
            partition.dual_trace(values),
        )

    def to_broken(self) -> np.ndarray:
        return np.concatenate((self.interior, self.corner, self.dual))

    def primal_values(self) -> np.ndarray:
        """Values in the r = interior + corner ordering."""
        return np.concatenate((self.interior, self.corner))

    def interior_part(self) -> "SplitFunction":
        return SplitFunction(self.partition, self.interior.copy(),
                             np.zeros_like(self.corner), np.zeros_like(self.dual))

    def corner_part(self) -> "SplitFunction":
        return SplitFunction(self.partition, np.zeros_like(self.interior),
                             self.corner.copy(), np.zeros_like(self.dual))

    def dual_part(self) -> "SplitFunction":
        return SplitFunction(self.partition, np.zeros_like(self.interior),
                             np.zeros_like(self.corner), self.dual.copy())

    def without_corners(self) -> "SplitFunction":
        """v_I + v_Delta."""
        return SplitFunction(self.partition, self.interior.copy(),
                             np.zeros_like(self.corner), self.dual.copy())

    def subdomain_values(self, j: int) -> np.ndarray:
        """Nodal values on the closure of subdomain j (row-major, zero on the Dirichlet boundary)."""
        index = self.partition.subdomain_broken_index(j)
        vector = self.to_broken()
        return np.where(index >= 0, vector[np.maximum(index, 0)], 0.0)

    def _check_compatible(self, other: "SplitFunction") -> None:
        if other.partition is not self.partition:
            raise DimensionError("Split functions belong to different partitions")

    def __add__(self, other: "SplitFunction") -> "SplitFunction":
        self._check_compatible(other)
        return SplitFunction(self.partition, self.interior + other.interior,
                             self.corner + other.corner, self.dual + other.dual)

    def __sub__(self, other: "SplitFunction") -> "SplitFunction":
        self._check_compatible(other)
        return SplitFunction(self.partition, self.interior - other.interior,
                             self.corner - other.corner, self.dual - other.dual)
