"""CSV and JSON artifacts.

Field dumps use the WaveField layout: a CSV with columns x,t,re_u,im_u in
row-major order over t then x, plus a JSON sidecar describing the grid and
the breather. Every JSON document carries the package version.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .exact import BreatherSpec, WaveField
from .grid import SpaceTimeGrid

FLOAT_FORMAT = "%.17g"


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays, complex numbers and enums."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": _finite(z.real), "im": _finite(z.imag)}
    if isinstance(obj, (np.floating, float)):
        return _finite(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _finite(x: float):
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def dumps(payload: dict) -> str:
    doc = {"version": __version__, **to_jsonable(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload))
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_rows(path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([FLOAT_FORMAT % v if isinstance(v, (float, np.floating)) else v
                        for v in row])
    return path


def write_field_csv(path, grid: SpaceTimeGrid, values: np.ndarray,
                    sidecar: Optional[dict] = None) -> tuple[Path, Path]:
    """Write values of shape (nt, nx) as x,t,re_u,im_u rows plus a JSON sidecar."""
    values = np.asarray(values, dtype=complex)
    if values.shape != (grid.nt, grid.nx):
        raise ValueError(f"values have shape {values.shape}, grid expects {(grid.nt, grid.nx)}")
    x, t = grid.mesh()
    path = Path(path)
    rows = zip(x.ravel(), t.ravel(), values.real.ravel(), values.imag.ravel())
    write_rows(path, ["x", "t", "re_u", "im_u"], rows)
    meta = {"grid": grid.as_dict(), "layout": "row-major over t then x",
            "columns": ["x", "t", "re_u", "im_u"]}
    if sidecar:
        meta.update(sidecar)
    side = write_json(path.with_suffix(".json"), meta)
    return path, side


def write_wavefield(path, wave: WaveField) -> tuple[Path, Path]:
    return write_field_csv(path, wave.grid, wave.values, {"spec": wave.spec.as_dict()})


def read_field_csv(path) -> tuple[SpaceTimeGrid, np.ndarray, dict]:
    """Inverse of ``write_field_csv``: (grid, values (nt, nx), sidecar)."""
    path = Path(path)
    meta = read_json(path.with_suffix(".json"))
    grid = SpaceTimeGrid.from_dict(meta["grid"])
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    values = (data[:, 2] + 1j * data[:, 3]).reshape(grid.nt, grid.nx)
    return grid, values, meta


def read_wavefield(path) -> WaveField:
    grid, values, meta = read_field_csv(path)
    return WaveField(BreatherSpec.from_dict(meta["spec"]), grid, values)
