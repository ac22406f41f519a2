"""
Run configuration for the command-line front end.

Values come from the command line, optionally seeded from a YAML file whose
keys are the long flag names with underscores (``N_list``, ``m_list``,
``dump_dir``...). Flags given on the command line win over the file.
"""

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging
import os

import yaml

logger = logging.getLogger(__name__)

COMMANDS = ("counterexample", "spectrum", "scaling", "poincare")
FORMATS = ("csv", "json")
OPERATORS = ("F", "S")
AXES = ("ratio", "subdomains")
THREADS_ENV = "FETI_LAB_THREADS"

DEFAULT_COUNTEREXAMPLE_M = 3
DEFAULT_FIXED = 4
DEFAULT_TOL = 1e-8


def parse_int_list(value: Any) -> List[int]:
    """Accept "3,4,5", a YAML list or a single integer."""
    if value is None:
        return []
    if isinstance(value, str):
        items = [item.strip() for item in value.split(",") if item.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [value]
    result = []
    for item in items:
        if isinstance(item, bool):
            raise ValueError(f"Expected an integer, got {item!r}")
        try:
            number = int(item)
        except (TypeError, ValueError):
            raise ValueError(f"Expected an integer, got {item!r}") from None
        if isinstance(item, float) and item != number:
            raise ValueError(f"Expected an integer, got {item!r}")
        result.append(number)
    return result


def load_yaml_config(path: str) -> Dict[str, Any]:
    with open(path, "r") as f:
        data = yaml.safe_load(f)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"Configuration file {path} must contain a mapping")
    return data


def lab_threads() -> int:
    """Worker threads for grid fan-out, capped by FETI_LAB_THREADS."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return threads


def _check_writable_file(path: Optional[str], what: str) -> None:
    if path is None:
        return
    target = Path(path)
    parent = target.parent if str(target.parent) else Path(".")
    if target.is_dir():
        raise ValueError(f"{what} path {path} is a directory")
    if not parent.is_dir():
        raise ValueError(f"{what} directory {parent} does not exist")
    if not os.access(parent, os.W_OK) or (target.exists() and not os.access(target, os.W_OK)):
        raise ValueError(f"{what} path {path} is not writable")


@dataclass
class RunConfig:
    command: str
    N_list: List[int] = field(default_factory=list)
    m_list: List[int] = field(default_factory=list)
    values: List[int] = field(default_factory=list)
    N: Optional[int] = None
    m: Optional[int] = None
    operator: Optional[str] = None
    fix: Optional[str] = None
    tol: float = DEFAULT_TOL
    format: str = "csv"
    output: Optional[str] = None
    plot: Optional[str] = None
    dump_dir: Optional[str] = None
    vanish_at_vertices: bool = False
    verbose: bool = False

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """Merge parsed arguments over an optional YAML file and the defaults."""
        file_values = load_yaml_config(args.config) if getattr(args, "config", None) else {}
        known = {f.name for f in fields(cls)}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

        merged: Dict[str, Any] = {"command": args.command}
        for name in known - {"command"}:
            value = getattr(args, name, None)
            if value is None or value is False:
                value = file_values.get(name, value)
            if value is not None:
                merged[name] = value

        for name in ("N_list", "m_list", "values"):
            if name in merged:
                merged[name] = parse_int_list(merged[name])
        for name in ("N", "m"):
            if name in merged:
                single = parse_int_list(merged[name])
                if len(single) != 1:
                    raise ValueError(f"{name} must be a single integer, got {merged[name]!r}")
                merged[name] = single[0]
        if "tol" in merged:
            merged["tol"] = float(merged["tol"])

        config = cls(**merged)
        if config.command == "counterexample" and config.m is None:
            config.m = DEFAULT_COUNTEREXAMPLE_M
        return config

    def validate(self) -> None:
        """Reject inconsistent configurations before any computation."""
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command '{self.command}', expected one of {COMMANDS}")
        if self.format not in FORMATS:
            raise ValueError(f"Unknown format '{self.format}', expected one of {FORMATS}")
        if not self.tol > 0:
            raise ValueError(f"Tolerance must be positive, got {self.tol}")

        getattr(self, f"_validate_{self.command}")()

        _check_writable_file(self.output, "Output")
        _check_writable_file(self.plot, "Plot")
        if self.dump_dir is not None:
            dump = Path(self.dump_dir)
            base = dump if dump.exists() else dump.parent
            if dump.exists() and not dump.is_dir():
                raise ValueError(f"Dump path {dump} is not a directory")
            if not base.is_dir() or not os.access(base, os.W_OK):
                raise ValueError(f"Dump directory {dump} cannot be created or written")

    def _validate_counterexample(self) -> None:
        if not self.N_list:
            raise ValueError("counterexample needs --N-list")
        if len(set(self.N_list)) != len(self.N_list):
            raise ValueError(f"--N-list has repeated values: {self.N_list}")
        if min(self.N_list) < 3:
            raise ValueError(f"counterexample needs every N >= 3, got {self.N_list}")
        if self.m < 2:
            raise ValueError(f"counterexample needs m >= 2, got {self.m}")

    def _validate_spectrum(self) -> None:
        self._validate_operator()
        if self.N is None or self.m is None:
            raise ValueError("spectrum needs --N and --m")
        if self.N < 2 or self.m < 2:
            raise ValueError(f"spectrum needs N >= 2 and m >= 2, got N={self.N} m={self.m}")
        if self.plot is not None:
            raise ValueError("spectrum has no varied parameter to plot")

    def _validate_scaling(self) -> None:
        self._validate_operator()
        if self.fix not in AXES:
            raise ValueError(f"scaling needs --fix one of {AXES}, got {self.fix!r}")
        if len(set(self.values)) < 3 or len(set(self.values)) != len(self.values):
            raise ValueError(f"scaling needs at least 3 distinct --values, got {self.values}")
        if min(self.values) < 2:
            raise ValueError(f"scaling values must be >= 2, got {self.values}")
        if self.fix == "ratio" and self.N is not None:
            raise ValueError("--fix ratio varies N; give the fixed ratio with --m")
        if self.fix == "subdomains" and self.m is not None:
            raise ValueError("--fix subdomains varies m; give the fixed subdomain count with --N")
        if self.fixed < 2:
            raise ValueError(f"The fixed parameter must be >= 2, got {self.fixed}")

    def _validate_poincare(self) -> None:
        if not self.m_list:
            raise ValueError("poincare needs --m-list")
        if len(set(self.m_list)) != len(self.m_list):
            raise ValueError(f"--m-list has repeated values: {self.m_list}")
        if min(self.m_list) < 2:
            raise ValueError(f"poincare needs every m >= 2, got {self.m_list}")

    def _validate_operator(self) -> None:
        if self.operator not in OPERATORS:
            raise ValueError(f"--operator must be one of {OPERATORS}, got {self.operator!r}")

    @property
    def fixed(self) -> int:
        """Fixed parameter of a scaling study: m for the ratio axis, N for the subdomain axis."""
        if self.fix == "ratio":
            return self.m if self.m is not None else DEFAULT_FIXED
        return self.N if self.N is not None else DEFAULT_FIXED
