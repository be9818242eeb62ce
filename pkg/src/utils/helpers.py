"""
Utility helper functions
Report formatting, time grids and flat-file writers for simulation output
"""
import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from src.core.errors import InvalidParameter
from src.models.records import SERIES_COLUMNS, TimeSeries

PathLike = Union[str, Path]


def time_grid(t_max: float, steps: int) -> np.ndarray:
    """
    Evenly spaced sample times from 0 to t_max inclusive

    Args:
        t_max: Final time (non-negative)
        steps: Number of samples (at least 1; a single sample is t = 0)

    Raises:
        InvalidParameter: For negative or non-finite t_max or steps < 1
    """
    if isinstance(steps, bool) or int(steps) != steps or steps < 1:
        raise InvalidParameter(f"steps must be a positive integer, got {steps!r}")
    if not math.isfinite(t_max) or t_max < 0:
        raise InvalidParameter(f"t_max must be finite and non-negative, got {t_max}")
    if steps == 1:
        return np.zeros(1)
    return np.linspace(0.0, float(t_max), int(steps))


def format_number(value: float) -> str:
    """Decimal with 15 significant digits"""
    return f"{float(value):.15g}"


def write_rows_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a CSV with LF line endings; floats use 15 significant digits

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) if isinstance(v, float) else v for v in row])
    return path


def write_series_csv(path: PathLike, series: TimeSeries) -> Path:
    """CSV with header t,F0,C0,C1,E01"""
    return write_rows_csv(path, SERIES_COLUMNS, series.rows())


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    return path


def format_report(data: Dict[str, Any], title: str = "Report") -> str:
    """
    Format data as a readable report

    Args:
        data: Data dictionary to format
        title: Report title

    Returns:
        Formatted report string
    """
    lines = [
        "=" * 50,
        title,
        "=" * 50,
        ""
    ]

    def format_value(value: Any, indent: int = 0) -> List[str]:
        prefix = "  " * indent
        result = []
        if isinstance(value, dict):
            for k, v in value.items():
                if isinstance(v, dict):
                    result.append(f"{prefix}{k}:")
                    result.extend(format_value(v, indent + 1))
                else:
                    result.append(f"{prefix}{k}: {v}")
        elif isinstance(value, list):
            for item in value:
                result.extend(format_value(item, indent))
        else:
            result.append(f"{prefix}{value}")
        return result

    for key, value in data.items():
        if isinstance(value, (dict, list)):
            lines.append(f"{key}:")
            lines.extend(format_value(value, 1))
        else:
            lines.append(f"{key}: {value}")

    lines.append("")
    lines.append("=" * 50)

    return "\n".join(lines)
