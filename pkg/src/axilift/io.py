"""CSV and JSON-lines output with a fixed float format."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(value)


def write_csv(path, header, rows, comment: str | None = None, footer=None) -> Path:
    """Write rows with a header line; ``footer`` rows follow the data."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if comment:
        lines.append("# " + comment)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    for row in footer or ():
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_field_csv(path, field) -> Path:
    g = field.grid
    R, Z = g.mesh()
    rows = zip(R.ravel(), Z.ravel(), field.values.ravel())
    return write_csv(path, ("r", "z", "value"), rows, comment="grid " + g.describe())


def read_field_csv(path, grid):
    """Inverse of :func:`write_field_csv`; values must be in the same (r, z) order."""
    from .errors import ShapeError
    from .grid import ScalarField

    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    try:
        data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ShapeError(f"{path}: {exc}") from exc
    if data.shape[0] != grid.nr * grid.nz:
        raise ShapeError(f"{path}: expected {grid.nr * grid.nz} rows, got {data.shape[0]}")
    return ScalarField(grid, data[:, 2].reshape(grid.shape))


def write_series_csv(path, series) -> Path:
    """ScalingSeries rows plus a footer row carrying the fit."""
    footer = [("slope", series.slope, "max_abs_residual", series.residual)]
    return write_csv(path, ("param", "value", "log_param", "log_value"), series.rows(), footer=footer)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def append_jsonl(path, record: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a") as fh:
        fh.write(json.dumps(_jsonable(record), sort_keys=True) + "\n")
    return path


def write_jsonl(path, records) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(_jsonable(r), sort_keys=True) + "\n" for r in records))
    return path
