import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from errors import ConvergenceError, SolverBreakdownError
from lab_config import AXES, FORMATS, OPERATORS, RunConfig, lab_threads
from report_writer import write_report
from svg_plot import LogLogPlot, reference_curve
from counterexample import counterexample_report
from assembly.matrix_dump import write_coo
from substructuring.operators import DENSE_CAP
from spectra.condition import bound_model, build_operators, condition_number, scaling_study
from spectra.poincare import poincare_constant

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3

Payload = Tuple[List[Dict[str, Any]], Dict[str, Any], Optional[LogLogPlot]]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, help="Output format (default: csv)")
    common.add_argument("--output", help="Write the table to this file instead of stdout")
    common.add_argument("--plot", help="Write a log-log SVG plot to this path")
    common.add_argument("--config", help="YAML file with default values for the flags")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(description="FETI-DP substructuring laboratory")
    subparsers = parser.add_subparsers(dest="command", help="Experiment to run")
    subparsers.required = True

    # Strengthened Cauchy-Schwarz counterexample
    counter_parser = subparsers.add_parser("counterexample", parents=[common],
                                           help="Energies and gamma of the counterexample function")
    counter_parser.add_argument("--N-list", dest="N_list", help="Comma separated subdomain counts per side (N >= 3)")
    counter_parser.add_argument("--m", type=int, help="Elements per subdomain side (default: 3)")

    # Extremal spectrum of one instance
    spectrum_parser = subparsers.add_parser("spectrum", parents=[common], help="Extremal eigenvalues of S or F")
    spectrum_parser.add_argument("--operator", choices=OPERATORS)
    spectrum_parser.add_argument("--N", type=int, help="Subdomains per side")
    spectrum_parser.add_argument("--m", type=int, help="Elements per subdomain side")
    spectrum_parser.add_argument("--tol", type=float, help="Lanczos relative tolerance (default: 1e-8)")
    spectrum_parser.add_argument("--dump-dir", dest="dump_dir", help="Write the operator blocks in coordinate format")

    # Condition number scaling
    scaling_parser = subparsers.add_parser("scaling", parents=[common], help="Condition number scaling study")
    scaling_parser.add_argument("--operator", choices=OPERATORS)
    scaling_parser.add_argument("--fix", choices=AXES, help="ratio: m fixed, N varies; subdomains: N fixed, m varies")
    scaling_parser.add_argument("--values", help="Comma separated values of the varied parameter")
    scaling_parser.add_argument("--N", type=int, help="Fixed subdomain count (with --fix subdomains)")
    scaling_parser.add_argument("--m", type=int, help="Fixed ratio H/h (with --fix ratio)")
    scaling_parser.add_argument("--tol", type=float, help="Lanczos relative tolerance (default: 1e-8)")

    # Coarse interpolation constant
    poincare_parser = subparsers.add_parser("poincare", parents=[common],
                                            help="Sharp constant of the coarse interpolation estimate")
    poincare_parser.add_argument("--m-list", dest="m_list", help="Comma separated ratios H/h (m >= 2)")
    poincare_parser.add_argument("--vanish-at-vertices", dest="vanish_at_vertices", action="store_true",
                                 help="Restrict to functions vanishing at the subdomain vertices")
    return parser


def _fan_out(function, items: Sequence) -> List:
    with ThreadPoolExecutor(max_workers=min(lab_threads(), max(len(items), 1))) as executor:
        return list(executor.map(function, items))


def run_counterexample(config: RunConfig) -> Payload:
    reports = _fan_out(lambda N: counterexample_report(N, config.m), sorted(config.N_list))
    logger.info("gamma sequence: " + ", ".join(f"N={r.N}: {r.gamma:.12g}" for r in reports))

    plot = None
    if config.plot:
        plot = LogLogPlot(f"Counterexample, m = {config.m}", "N", "gamma")
        plot.add("gamma(N)", [r.N for r in reports], [r.gamma for r in reports])
    return [r.as_row() for r in reports], {}, plot


def _dump_operators(config: RunConfig, operators) -> None:
    directory = Path(config.dump_dir)
    directory.mkdir(exist_ok=True)
    write_coo(directory / "A_rr.coo", operators.blocks.A_rr)
    write_coo(directory / "A_rd.coo", operators.blocks.A_rd)
    write_coo(directory / "A_dd.coo", operators.blocks.A_dd)
    write_coo(directory / "B_delta.coo", operators.jump.matrix)
    if operators.schur.dim <= DENSE_CAP:
        write_coo(directory / "S_dense.coo", operators.schur.dense())
    else:
        logger.warning(f"Skipping dense S: dual dimension {operators.schur.dim} exceeds {DENSE_CAP}")


def run_spectrum(config: RunConfig) -> Payload:
    operators = build_operators(config.N, config.m)
    if config.dump_dir:
        _dump_operators(config, operators)
    report = condition_number(config.operator, config.N, config.m, config.tol, operators=operators)
    return [report.as_row()], {}, None


def run_scaling(config: RunConfig) -> Payload:
    study = scaling_study(config.operator, config.fix, config.values, fixed=config.fixed,
                          tol=config.tol, max_workers=lab_threads())

    plot = None
    if config.plot:
        varied = [r.N if study.varied == "N" else r.m for r in study.reports]
        kappa = [r.kappa for r in study.reports]
        model = [bound_model(config.operator, r.N, r.m) for r in study.reports]
        fixed_name = "m" if study.varied == "N" else "N"
        plot = LogLogPlot(f"kappa({config.operator}), {fixed_name} = {study.fixed}", study.varied, "kappa")
        plot.add(f"kappa({config.operator})", varied, kappa)
        plot.add(f"growth model (slope {study.slopes['kappa']:.3f} fitted)", varied,
                 reference_curve(model, kappa[0]), guide=True)
    return [r.as_row() for r in study.reports], {"slopes": study.slopes}, plot


def run_poincare(config: RunConfig) -> Payload:
    reports = _fan_out(lambda m: poincare_constant(m, config.vanish_at_vertices), sorted(config.m_list))

    plot = None
    if config.plot:
        ms = [r.m for r in reports]
        c_star = [r.c_star for r in reports]
        plot = LogLogPlot("Coarse interpolation constant", "m", "c*")
        plot.add("c*(m)", ms, c_star)
        plot.add("1 + ln m", ms, reference_curve([1.0 + math.log(m) for m in ms], c_star[0]), guide=True)
    return [r.as_row() for r in reports], {}, plot


COMMANDS = {
    "counterexample": run_counterexample,
    "spectrum": run_spectrum,
    "scaling": run_scaling,
    "poincare": run_poincare,
}


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.INFO, format='%(levelname)s: %(message)s')
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.INFO)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one experiment from command-line arguments.

    Returns:
        0 on success, 2 on invalid arguments or unwritable output,
        3 when a solver breaks down, does not converge or runs out of memory
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    configure_logging(args.verbose)

    try:
        config = RunConfig.from_args(args)
        config.validate()
    except (ValueError, OSError, yaml.YAMLError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    try:
        rows, extra, plot = COMMANDS[config.command](config)
    except (ConvergenceError, SolverBreakdownError) as e:
        logger.error(f"Solver failure: {e}")
        return EXIT_SOLVER
    except MemoryError:
        logger.error("Solver failure: out of memory for this instance")
        return EXIT_SOLVER
    except ValueError as e:
        logger.error(f"Invalid request: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        return EXIT_USAGE

    if config.format == "csv" and "slopes" in extra:
        logger.info("fitted slopes: " + ", ".join(f"{k}={v:.12g}" for k, v in extra["slopes"].items()))

    try:
        write_report(config.command, rows, config.format, config.output, extra)
        if plot is not None:
            plot.save(config.plot)
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        return EXIT_USAGE
    return EXIT_OK


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
