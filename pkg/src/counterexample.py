"""
Counterexample to an h- and H-uniform strengthened Cauchy-Schwarz inequality
between the corner part and the interior-plus-dual part of FETI-DP functions.

The test function w takes the value 1 at every dual node and is extended
harmonically; its corner energy and the energy of its remaining part grow at
the same rate in N, so the ratio tends to 1.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple
import logging
import math

import numpy as np

from mesh.structured_mesh import MeshConfig, StructuredMesh, build_mesh
from mesh.dof_partition import DofPartition, classify_dofs
from assembly.split_function import SplitFunction
from assembly.stiffness import BlockStiffness, assemble_blocks, bilinear, energy, energy_subdomain
from substructuring.factorization import SymmetricFactor
from substructuring.operators import harmonic_extension

logger = logging.getLogger(__name__)

HEADLINE_M = 3
CASES = ("floating", "case_i", "case_ii")
# Subdomains are classified by how many of their edges lie on the outer boundary
CASE_BY_BOUNDARY_EDGES = {0: "floating", 1: "case_i", 2: "case_ii"}
SPREAD_TOL = 1e-10
MIN_ENERGY = 1e-14


def closed_form_corner_energy(N: int) -> float:
    return 4.0 * (N - 1) ** 2


def closed_form_remainder_energy(N: int) -> float:
    """Energy of w_I + w_Delta for m = 3."""
    return 4.0 * (N - 2) ** 2 + 17.0 * (N - 2) + 14.0


@dataclass
class CounterexampleReport:
    N: int
    m: int
    a_cc: float
    a_dd: float
    per_case_energies: Dict[str, float]
    case_counts: Dict[str, int]
    gamma_sq: float
    gamma: float
    gamma_sym: float
    closed_form_residuals: Dict[str, float] = field(default_factory=dict)
    # Largest minus smallest per-subdomain energy within each case
    case_spreads: Dict[str, float] = field(default_factory=dict)

    def as_row(self) -> Dict[str, float]:
        return {
            "N": self.N,
            "m": self.m,
            "a_cc": self.a_cc,
            "a_dd": self.a_dd,
            "gamma_sq": self.gamma_sq,
            "gamma": self.gamma,
            "case_i_energy": self.per_case_energies.get("case_i", math.nan),
            "case_ii_energy": self.per_case_energies.get("case_ii", math.nan),
            "floating_energy": self.per_case_energies.get("floating", math.nan),
            "residual_cc": self.closed_form_residuals.get("cc", math.nan),
            "residual_dd": self.closed_form_residuals.get("dd", math.nan),
        }


def build_w(mesh: StructuredMesh, part: DofPartition, blocks: Optional[BlockStiffness] = None) -> SplitFunction:
    """
    Build the counterexample function w.

    Args:
        mesh: structured mesh with N >= 2
        part: its DOF partition
        blocks: assembled blocks to reuse (assembled when None)

    Returns:
        SplitFunction with w_Delta = 1 and harmonically extended w_I, w_c
    """
    if mesh.config.N < 2:
        raise ValueError(f"The counterexample needs an interface, N >= 2 (got N={mesh.config.N})")
    if blocks is None:
        blocks = assemble_blocks(mesh, part)
    return harmonic_extension(blocks, np.ones(part.num_local_dual))


def subdomain_case(mesh: StructuredMesh, j: int) -> str:
    return CASE_BY_BOUNDARY_EDGES[mesh.boundary_edge_count(j)]


def counterexample_report(N: int, m: int = HEADLINE_M) -> CounterexampleReport:
    """
    Measure every energy of the counterexample on an N x N decomposition.

    Args:
        N: subdomains per side, N >= 3 so that all three subdomain cases occur
        m: elements per subdomain side, m >= 2

    Returns:
        CounterexampleReport
    """
    if N < 3:
        raise ValueError(f"The counterexample report needs N >= 3, got N={N}")
    if m < 2:
        raise ValueError(f"The counterexample report needs m >= 2, got m={m}")

    mesh = build_mesh(MeshConfig(N, m))
    part = classify_dofs(mesh)
    blocks = assemble_blocks(mesh, part)
    w = build_w(mesh, part, blocks)

    w_corner = w.corner_part()
    w_rest = w.without_corners()
    a_cc = energy(blocks, w_corner)
    a_dd = energy(blocks, w_rest)

    by_case: Dict[str, List[float]] = {case: [] for case in CASES}
    for j in range(mesh.num_subdomains):
        by_case[subdomain_case(mesh, j)].append(energy_subdomain(blocks, w_rest, j))

    per_case_energies = {}
    case_spreads = {}
    for case, values in by_case.items():
        spread = float(max(values) - min(values))
        case_spreads[case] = spread
        if spread > SPREAD_TOL:
            logger.warning(f"N={N} m={m}: {case} energies spread by {spread:.3e}")
        per_case_energies[case] = float(np.mean(values))

    residuals = {"cc": abs(a_cc - closed_form_corner_energy(N))}
    residuals["dd"] = abs(a_dd - closed_form_remainder_energy(N)) if m == HEADLINE_M else math.nan

    gamma_sq = a_cc / a_dd
    report = CounterexampleReport(
        N=N,
        m=m,
        a_cc=a_cc,
        a_dd=a_dd,
        per_case_energies=per_case_energies,
        case_counts={case: len(values) for case, values in by_case.items()},
        gamma_sq=gamma_sq,
        gamma=math.sqrt(gamma_sq),
        gamma_sym=2.0 * a_cc / (a_cc + a_dd),
        closed_form_residuals=residuals,
        case_spreads=case_spreads,
    )
    logger.info(f"Counterexample N={N} m={m}: a_cc={a_cc:.12g} a_dd={a_dd:.12g} gamma^2={gamma_sq:.12g}")
    return report


def gamma_sequence(N_values: Iterable[int], m: int = HEADLINE_M) -> List[Tuple[int, float]]:
    """(N, gamma) pairs of the counterexample for every requested N."""
    return [(N, counterexample_report(N, m).gamma) for N in N_values]


def measure_scs_gamma(
    blocks: BlockStiffness,
    v_dual,
    symmetric: bool = False,
    factor: Optional[SymmetricFactor] = None,
) -> float:
    """
    Measure the strengthened Cauchy-Schwarz ratio of the harmonic extension of v_dual.

    With x = v_I + v_Delta and c = v_c the product form returns
    |a(x, c)| / (a(x, x) a(c, c))^(1/2); the symmetric form returns
    -2 a(x, c) / (a(x, x) + a(c, c)).

    Args:
        blocks: assembled broken stiffness
        v_dual: subdomain-local dual values
        symmetric: return the symmetric form
        factor: factorization of A_rr to reuse

    Returns:
        The measured ratio, 0 when the corner part vanishes
    """
    v = harmonic_extension(blocks, v_dual, factor=factor)
    rest = v.without_corners()
    corner = v.corner_part()
    a_rest = energy(blocks, rest)
    if a_rest <= MIN_ENERGY:
        raise ValueError(f"Interior and dual energy {a_rest:.3e} is degenerate")
    a_corner = energy(blocks, corner)
    coupling = bilinear(blocks, rest, corner)
    if symmetric:
        return -2.0 * coupling / (a_rest + a_corner)
    if a_corner <= MIN_ENERGY * a_rest:
        return 0.0
    return abs(coupling) / math.sqrt(a_rest * a_corner)
