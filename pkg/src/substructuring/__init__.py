"""
Harmonic extension, Schur complement, jump and dual operators
"""

from substructuring.factorization import SymmetricFactor
from substructuring.krylov import KrylovResult, conjugate_gradient
from substructuring.operators import (
    DENSE_CAP,
    DualOperator,
    JumpOperator,
    SchurOperator,
    dual_apply,
    harmonic_extension,
    jump_operator,
    schur_apply,
    schur_dense,
)
from substructuring.coarse import (
    coarse_interpolation,
    coarse_interpolation_matrix,
    coarse_interpolation_split,
)

__all__ = [
    "SymmetricFactor",
    "KrylovResult",
    "conjugate_gradient",
    "DENSE_CAP",
    "DualOperator",
    "JumpOperator",
    "SchurOperator",
    "dual_apply",
    "harmonic_extension",
    "jump_operator",
    "schur_apply",
    "schur_dense",
    "coarse_interpolation",
    "coarse_interpolation_matrix",
    "coarse_interpolation_split",
]
