from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence
import logging
import math
import os

import numpy as np

from mesh.structured_mesh import MeshConfig, StructuredMesh, build_mesh
from mesh.dof_partition import DofPartition, classify_dofs
from assembly.stiffness import BlockStiffness, assemble_blocks
from substructuring.operators import DualOperator, JumpOperator, SchurOperator, jump_operator
from spectra.lanczos import DEFAULT_TOL, lanczos_extremal

logger = logging.getLogger(__name__)

OPERATORS = ("F", "S")
AXES = ("ratio", "subdomains")
MIN_GRID_POINTS = 3


@dataclass
class OperatorSet:
    """Every operator of one (N, m) instance."""

    mesh: StructuredMesh
    partition: DofPartition
    blocks: BlockStiffness
    schur: SchurOperator
    jump: JumpOperator
    dual: DualOperator


def build_operators(N: int, m: int, inner: str = "direct") -> OperatorSet:
    mesh = build_mesh(MeshConfig(N, m))
    part = classify_dofs(mesh)
    blocks = assemble_blocks(mesh, part)
    schur = SchurOperator(blocks)
    jump = jump_operator(mesh, part)
    return OperatorSet(mesh, part, blocks, schur, jump, DualOperator(schur, jump, inner=inner))


def bound_model(op_tag: str, N: int, m: int) -> float:
    """
    Condition number growth model of the operator in two dimensions.

    F: m (1 + ln m), independent of N.
    S: (1 + ln m) / (H h) = (1 + ln m) N^2 m.
    """
    log_term = 1.0 + math.log(m)
    if op_tag == "F":
        return m * log_term
    if op_tag == "S":
        return log_term * N * N * m
    raise ValueError(f"Unknown operator '{op_tag}', expected one of {OPERATORS}")


@dataclass
class SpectralReport:
    operator: str
    N: int
    m: int
    lambda_min: float
    lambda_max: float
    kappa: float
    bound_ratio: float
    iterations: int
    residual: float

    def as_row(self) -> Dict[str, object]:
        return {
            "operator": self.operator,
            "N": self.N,
            "m": self.m,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "kappa": self.kappa,
            "bound_ratio": self.bound_ratio,
            "iters": self.iterations,
            "residual": self.residual,
        }


def _check_instance(op_tag: str, N: int, m: int) -> None:
    if op_tag not in OPERATORS:
        raise ValueError(f"Unknown operator '{op_tag}', expected one of {OPERATORS}")
    if N < 2 or m < 2:
        raise ValueError(f"Spectra need N >= 2 and m >= 2, got N={N} m={m}")


def condition_number(
    op_tag: str,
    N: int,
    m: int,
    tol: float = DEFAULT_TOL,
    operators: Optional[OperatorSet] = None,
) -> SpectralReport:
    """
    Extremal eigenvalues and condition number of S or F.

    Args:
        op_tag: "S" or "F"
        N: subdomains per side, N >= 2
        m: elements per subdomain side, m >= 2
        tol: Lanczos relative residual tolerance
        operators: prebuilt operators to reuse

    Returns:
        SpectralReport with kappa divided by the growth model as bound_ratio
    """
    _check_instance(op_tag, N, m)
    if operators is None:
        operators = build_operators(N, m)

    if op_tag == "S":
        result = lanczos_extremal(operators.schur.apply, operators.schur.dim, tol=tol)
    else:
        result = lanczos_extremal(operators.dual.apply, operators.dual.dim, tol=tol)

    kappa = result.lambda_max / result.lambda_min
    report = SpectralReport(
        operator=op_tag,
        N=N,
        m=m,
        lambda_min=result.lambda_min,
        lambda_max=result.lambda_max,
        kappa=kappa,
        bound_ratio=kappa / bound_model(op_tag, N, m),
        iterations=result.iterations,
        residual=result.residual,
    )
    logger.info(
        f"{op_tag} N={N} m={m}: lambda in [{result.lambda_min:.6g}, {result.lambda_max:.6g}], "
        f"kappa={kappa:.6g} after {result.iterations} iterations"
    )
    return report


def fitted_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ln y against ln x."""
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)[0])


def normalize_axis(axis: str) -> str:
    name = axis[len("fix-"):] if axis.startswith("fix-") else axis
    if name not in AXES:
        raise ValueError(f"Unknown scaling axis '{axis}', expected one of {AXES}")
    return name


@dataclass
class ScalingStudy:
    """
    Spectra over a grid that varies N with m fixed (axis "ratio") or m with N
    fixed (axis "subdomains"), with log-log slopes against the varied parameter.
    """

    operator: str
    axis: str
    fixed: int
    values: List[int]
    reports: List[SpectralReport]
    slopes: Dict[str, float] = field(default_factory=dict)

    @property
    def varied(self) -> str:
        return "N" if self.axis == "ratio" else "m"


def scaling_study(
    op_tag: str,
    axis: str,
    values: Sequence[int],
    fixed: int = 4,
    tol: float = DEFAULT_TOL,
    max_workers: Optional[int] = None,
) -> ScalingStudy:
    """
    Run condition_number over a one-parameter grid.

    Args:
        op_tag: "S" or "F"
        axis: "ratio" (m fixed, N varies) or "subdomains" (N fixed, m varies)
        values: the varied parameter, at least MIN_GRID_POINTS distinct values
        fixed: the fixed parameter
        tol: Lanczos tolerance
        max_workers: worker threads, os.cpu_count() when None

    Returns:
        ScalingStudy ordered by (N, m)
    """
    axis = normalize_axis(axis)
    values = sorted({int(v) for v in values})
    if len(values) < MIN_GRID_POINTS:
        raise ValueError(f"A scaling study needs at least {MIN_GRID_POINTS} distinct grid points, got {values}")

    grid = [(v, fixed) if axis == "ratio" else (fixed, v) for v in values]
    for N, m in grid:
        _check_instance(op_tag, N, m)

    workers = max_workers or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=min(workers, len(grid))) as executor:
        reports = list(executor.map(lambda point: condition_number(op_tag, point[0], point[1], tol), grid))
    reports.sort(key=lambda report: (report.N, report.m))

    varied = [report.N if axis == "ratio" else report.m for report in reports]
    slopes = {
        "kappa": fitted_slope(varied, [report.kappa for report in reports]),
        "lambda_min": fitted_slope(varied, [report.lambda_min for report in reports]),
        "lambda_max": fitted_slope(varied, [report.lambda_max for report in reports]),
    }
    logger.info(
        f"{op_tag} scaling over {'N' if axis == 'ratio' else 'm'}={values}: "
        + ", ".join(f"slope({name})={value:.4f}" for name, value in slopes.items())
    )
    return ScalingStudy(op_tag, axis, fixed, values, reports, slopes)
