"""
Broken stiffness form assembly module
"""

from assembly.split_function import SplitFunction
from assembly.stiffness import (
    BlockStiffness,
    assemble_blocks,
    assemble_global,
    bilinear,
    element_stiffness,
    energy,
    energy_subdomain,
    free_nodes,
    local_stiffness,
)
from assembly.matrix_dump import write_coo

__all__ = [
    "SplitFunction",
    "BlockStiffness",
    "assemble_blocks",
    "assemble_global",
    "bilinear",
    "element_stiffness",
    "energy",
    "energy_subdomain",
    "free_nodes",
    "local_stiffness",
    "write_coo",
]
