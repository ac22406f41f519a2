"""
CSV and JSON rendering of experiment tables.

Floats are written with 12 significant digits in both formats so the two
encode the same values; NaN becomes ``nan`` in CSV and ``null`` in JSON.
"""

from typing import Any, Dict, List, Optional, Sequence, TextIO
import csv
import io
import json
import logging
import math
import sys

import numpy as np

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12


def format_number(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def json_number(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float) and not isinstance(value, bool):
        if math.isnan(value) or math.isinf(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return value


def render_csv(rows: Sequence[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = list(rows[0].keys())
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row[column]) for column in columns])
    return buffer.getvalue()


def render_json(command: str, rows: Sequence[Dict[str, Any]], extra: Optional[Dict[str, Any]] = None) -> str:
    document: Dict[str, Any] = {
        "command": command,
        "rows": [{key: json_number(value) for key, value in row.items()} for row in rows],
    }
    for key, value in (extra or {}).items():
        if isinstance(value, dict):
            document[key] = {k: json_number(v) for k, v in value.items()}
        else:
            document[key] = json_number(value)
    return json.dumps(document, indent=2) + "\n"


def write_report(
    command: str,
    rows: List[Dict[str, Any]],
    fmt: str = "csv",
    output: Optional[str] = None,
    extra: Optional[Dict[str, Any]] = None,
    stream: Optional[TextIO] = None,
) -> None:
    """
    Write a result table to a file or to stdout.

    Args:
        command: subcommand that produced the rows
        rows: one dict per table row, identical keys
        fmt: "csv" or "json"
        output: file path, stdout when None
        extra: additional top-level JSON entries (ignored for CSV)
        stream: stream used when output is None
    """
    if fmt == "csv":
        text = render_csv(rows)
    elif fmt == "json":
        text = render_json(command, rows, extra)
    else:
        raise ValueError(f"Unknown output format '{fmt}'")

    if output is None:
        (stream or sys.stdout).write(text)
        return
    with open(output, "w") as f:
        f.write(text)
    logger.info(f"Wrote {len(rows)} {command} rows to {output}")
