"""Report bundle emission: per-suite JSON, plot-ready CSV traces and the summary.

JSON is written with sorted keys, two-space indent and shortest round-trip
floats; non-finite numbers become the strings "inf", "-inf" and "nan".
Nothing time-dependent is written, so a rerun reproduces every file
byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np
import pandas as pd

GREEN_TRACE_COLUMNS = ["k", "lambda", "G_x0y0", "lambda0_k", "min_entry"]
GELFAND_COLUMNS = ["n", "p", "r_n"]
PERTURBATION_COLUMNS = ["mode", "k", "S_k", "verdict"]

_VERSIONED = ("numpy", "scipy", "pandas", "pydantic", "langgraph", "structlog")


def _float(value: float) -> Any:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays, complex numbers and tuples."""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_float(float(value.real)), _float(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        return _float(float(value))
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def dumps(data: Any) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def write_csv(path: Path, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> Path:
    """CSV with a fixed column order; an empty trace still gets its header."""
    frame = pd.DataFrame([to_jsonable(dict(row)) for row in rows], columns=list(columns))
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def versions() -> Dict[str, str]:
    found: Dict[str, str] = {}
    for name in _VERSIONED:
        try:
            found[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            found[name] = "missing"
    return found


@dataclass
class ReportBundle:
    """Paths of everything written for one scenario, plus the summary itself."""

    directory: Path
    summary: Dict[str, Any]
    files: List[Path] = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return int(self.summary["exit_status"])

    @property
    def passed(self) -> bool:
        return bool(self.summary["passed"])


def write_bundle(
    directory: Path,
    summary: Dict[str, Any],
    reports: Mapping[str, Any],
    traces: Mapping[str, List[Dict[str, Any]]],
) -> ReportBundle:
    """Write every suite report and trace, then the summary, under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files: List[Path] = []
    for suite, report in sorted(reports.items()):
        files.append(write_json(directory / f"{suite}_report.json", report))

    for name, columns in (
        ("green_trace", GREEN_TRACE_COLUMNS),
        ("gelfand", GELFAND_COLUMNS),
        ("perturbation_profile", PERTURBATION_COLUMNS),
    ):
        if name in traces:
            files.append(write_csv(directory / f"{name}.csv", traces[name], columns))

    files.append(write_json(directory / "summary.json", summary))
    return ReportBundle(directory=directory, summary=summary, files=files)
