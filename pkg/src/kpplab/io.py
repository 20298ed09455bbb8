"""CSV and sidecar formats (schemas in docs/formats.md).

Floats are written with ``%.17g`` so files round-trip exactly and two runs
with the same seed produce identical bytes.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SNAPSHOT_HEADER = ("replica", "t", "id", "parent_id", "x", "y", "max_drift_excess")
SERIES_HEADER = ("replica", "t", "A", "D", "W", "Z", "alpha", "Z_alpha", "lambda", "mu", "W_lm")
SUMMARY_HEADER = ("quantity", "param", "t", "q1", "median", "q3", "mean", "se", "replicas")
PROBE_HEADER = ("x", "y", "estimate", "std_error", "replicas", "T", "alpha")
PROFILE_HEADER = ("x", "value")
FIELD_HEADER = ("x", "y", "value")
REPORT_HEADER = ("check", "param", "y", "value", "tolerance", "pass")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path: Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def snapshot_rows(snapshots, replica: int):
    for s in snapshots:
        for i, p, x, y, m in zip(s.ids, s.parent_ids, s.x, s.y, s.max_drift_excess):
            yield (replica, s.t, int(i), "" if p < 0 else int(p), x, y, m)


def write_profile(path: Path, profile) -> Path:
    return write_csv(path, PROFILE_HEADER, zip(profile.grid, profile.values))


def write_field(path: Path, field) -> tuple[Path, Path]:
    """``x,y,value`` rows (y outer, x inner) plus a JSON sidecar next to it."""
    path = Path(path)
    xs, ys = field.x, field.y

    def rows():
        for j, yv in enumerate(ys):
            for i, xv in enumerate(xs):
                yield (xv, yv, field.values[j, i])

    write_csv(path, FIELD_HEADER, rows())
    side = path.with_suffix(".json")
    side.write_text(json.dumps(field.sidecar(), indent=2, sort_keys=True) + "\n")
    return path, side


def read_field(path: Path):
    from .pde_2d import Field2D

    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    nx, ny = int(meta["nx"]), int(meta["ny"])
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.shape != (nx * ny, 3):
        raise ValueError("field CSV does not match its sidecar")
    vals = data[:, 2].reshape(ny, nx)
    extra = {k: v for k, v in meta.items()
             if k not in ("x_range", "y_range", "hx", "hy", "nx", "ny", "frame_speed_c", "order")}
    return Field2D(float(meta["x_range"][0]), float(meta["hx"]), float(meta["hy"]), vals,
                   float(meta["frame_speed_c"]), None, extra, int(meta.get("order", 4)))
