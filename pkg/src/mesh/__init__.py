"""
Structured mesh and DOF classification module
"""

from mesh.structured_mesh import MeshConfig, StructuredMesh, build_mesh
from mesh.dof_partition import DofPartition, InterfaceEdge, classify_dofs

__all__ = [
    "MeshConfig",
    "StructuredMesh",
    "build_mesh",
    "DofPartition",
    "InterfaceEdge",
    "classify_dofs",
]
