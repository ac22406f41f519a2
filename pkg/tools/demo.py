#!/usr/bin/env python3
"""
FETI-DP Substructuring Laboratory Demo

This script runs the headline experiments end to end: the counterexample
energies and gamma sequence, one extremal spectrum, a small condition number
scaling study and the coarse interpolation constant.
"""

import logging
import sys
from pathlib import Path

# Add the src directory to the path
sys.path.append(str(Path(__file__).parent.parent / "src"))
from counterexample import counterexample_report, gamma_sequence
from spectra.condition import condition_number, scaling_study
from spectra.poincare import poincare_constant

# Configure logging
logging.basicConfig(level=logging.WARNING, format='%(levelname)s: %(message)s')
logger = logging.getLogger(__name__)


def demo_counterexample():
    """Demo the counterexample energies."""
    print("DEMO 1: Counterexample energies (m = 3)")
    print("=" * 50)
    print(f"{'N':>4} {'a_cc':>10} {'a_dd':>10} {'gamma^2':>14} {'case i':>8} {'case ii':>8} {'floating':>8}")
    for N in (3, 4, 8):
        report = counterexample_report(N)
        energies = report.per_case_energies
        print(f"{N:>4} {report.a_cc:>10.6g} {report.a_dd:>10.6g} {report.gamma_sq:>14.12g} "
              f"{energies['case_i']:>8.6g} {energies['case_ii']:>8.6g} {energies['floating']:>8.6g}")


def demo_gamma_sequence():
    """Demo the gamma sequence tending to 1."""
    print("\nDEMO 2: Strengthened Cauchy-Schwarz constant")
    print("=" * 50)
    for N, gamma in gamma_sequence([3, 8, 16, 32]):
        print(f"N = {N:>3}: gamma = {gamma:.12g}")


def demo_spectrum():
    """Demo one extremal spectrum of F."""
    print("\nDEMO 3: Extremal spectrum of F (N = 4, m = 4)")
    print("=" * 50)
    report = condition_number("F", 4, 4)
    print(f"lambda_min = {report.lambda_min:.12g}")
    print(f"lambda_max = {report.lambda_max:.12g}")
    print(f"kappa      = {report.kappa:.12g} (bound ratio {report.bound_ratio:.6g})")


def demo_scaling():
    """Demo a small scaling study."""
    print("\nDEMO 4: kappa(F) with N = 4 fixed")
    print("=" * 50)
    study = scaling_study("F", "subdomains", [4, 8, 16], fixed=4)
    for report in study.reports:
        print(f"m = {report.m:>3}: kappa = {report.kappa:.12g}, bound ratio = {report.bound_ratio:.6g}")
    print(f"fitted slope of ln kappa vs ln m: {study.slopes['kappa']:.4f}")


def demo_poincare():
    """Demo the coarse interpolation constant."""
    print("\nDEMO 5: Coarse interpolation constant")
    print("=" * 50)
    for m in (2, 4, 8, 16):
        report = poincare_constant(m)
        print(f"m = {m:>3}: c* = {report.c_star:.12g}, c*/(1 + ln m) = {report.ratio_log:.6g}")


def main():
    """Run all demos."""
    print("FETI-DP Substructuring Laboratory")
    print("=" * 60)
    demo_counterexample()
    demo_gamma_sequence()
    demo_spectrum()
    demo_scaling()
    demo_poincare()
    return 0


if __name__ == "__main__":
    sys.exit(main())
