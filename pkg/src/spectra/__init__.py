"""
Extremal eigenvalues, condition number scaling and interpolation constants
"""

from spectra.lanczos import DEFAULT_TOL, LanczosResult, lanczos_extremal
from spectra.condition import (
    OperatorSet,
    ScalingStudy,
    SpectralReport,
    bound_model,
    build_operators,
    condition_number,
    fitted_slope,
    scaling_study,
)
from spectra.poincare import PoincareReport, boundary_mass, poincare_constant

__all__ = [
    "DEFAULT_TOL",
    "LanczosResult",
    "lanczos_extremal",
    "OperatorSet",
    "ScalingStudy",
    "SpectralReport",
    "bound_model",
    "build_operators",
    "condition_number",
    "fitted_slope",
    "scaling_study",
    "PoincareReport",
    "boundary_mass",
    "poincare_constant",
]
