"""Reading and writing trajectory files.

CSV files carry a header row with columns ``t, x, y`` and optionally ``v`` and
``heading``.  JSON files hold either an object of equal-length column arrays
or a list of row objects with the same keys.  Units: seconds, meters, m/s,
radians.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ..exceptions import TrajectoryFormatError
from ..metrics import Trajectory

REQUIRED = ("t", "x", "y")
OPTIONAL = ("v", "heading")
UNIFORM_TOL = 1e-6


def _parse_cell(raw, row, col):
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise TrajectoryFormatError(f"row {row}, column {col!r}: cannot parse {raw!r}") from None
    if math.isnan(value):
        raise TrajectoryFormatError(f"row {row}, column {col!r}: NaN value")
    return value


def _read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        reader.fieldnames = header
        rows = list(reader)
    return header, rows


def _read_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        cols = {k: v for k, v in doc.items() if k in REQUIRED + OPTIONAL}
        lengths = {len(v) for v in cols.values()}
        if len(lengths) > 1:
            raise TrajectoryFormatError("JSON trajectory columns have different lengths")
        n = lengths.pop() if lengths else 0
        rows = [{k: cols[k][i] for k in cols} for i in range(n)]
        return list(cols), rows
    if isinstance(doc, list):
        header = list(doc[0]) if doc else []
        return header, doc
    raise TrajectoryFormatError("JSON trajectory must be an object of columns or a list of rows")


def _columns(header, rows):
    missing = [c for c in REQUIRED if c not in header]
    if missing:
        raise TrajectoryFormatError(f"missing required column(s): {', '.join(missing)}")
    present = [c for c in REQUIRED + OPTIONAL if c in header]
    data = {c: np.empty(len(rows)) for c in present}
    for i, row in enumerate(rows, start=1):
        for c in present:
            data[c][i - 1] = _parse_cell(row.get(c), i, c)
    return data


def derive_speed(t, x, y):
    """Speed from central differences of positions (one-sided at the ends)."""
    return np.hypot(np.gradient(x, t), np.gradient(y, t))


def derive_heading(t, x, y, eps=1e-9):
    """Direction of motion from position differences, unwrapped.

    Samples where the vehicle does not move keep the previous heading.
    """
    dx, dy = np.gradient(x, t), np.gradient(y, t)
    moving = np.hypot(dx, dy) > eps
    h = np.arctan2(dy, dx)
    if not moving.any():
        return np.zeros_like(t)
    first = int(np.argmax(moving))
    h[:first] = h[first]
    for i in range(first + 1, len(h)):
        if not moving[i]:
            h[i] = h[i - 1]
    return np.unwrap(h)


def _resample(data):
    t = data["t"]
    steps = np.diff(t)
    if np.max(np.abs(steps - steps[0])) <= UNIFORM_TOL:
        # snap to an exactly uniform grid so the Trajectory invariant holds
        dt = (t[-1] - t[0]) / (len(t) - 1)
        data["t"] = t[0] + dt * np.arange(len(t))
        return data
    dt = float(np.median(steps))
    n = int(math.floor((t[-1] - t[0]) / dt + 1e-9)) + 1
    grid = t[0] + dt * np.arange(n)
    out = {"t": grid}
    for c, col in data.items():
        if c == "t":
            continue
        src = np.unwrap(col) if c == "heading" else col
        out[c] = np.interp(grid, t, src)
    return out


def load_trajectory(path, fmt=None):
    """Read a trajectory file and return a uniformly sampled :class:`Trajectory`."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt == "csv":
        header, rows = _read_csv(path)
    elif fmt == "json":
        header, rows = _read_json(path)
    else:
        raise TrajectoryFormatError(f"unsupported trajectory format {fmt!r}")
    if len(rows) < 3:
        raise TrajectoryFormatError(f"{path}: need at least 3 rows, got {len(rows)}")
    data = _columns(header, rows)
    if np.any(np.diff(data["t"]) <= 0):
        raise TrajectoryFormatError(f"{path}: time column is not strictly increasing")
    data = _resample(data)
    t, x, y = data["t"], data["x"], data["y"]
    v = data["v"] if "v" in data else derive_speed(t, x, y)
    heading = data["heading"] if "heading" in data else derive_heading(t, x, y)
    if np.any(v < 0):
        raise TrajectoryFormatError(f"{path}: negative speed values")
    return Trajectory(t, x, y, v, heading)


def save_trajectory(traj, path, fmt=None):
    """Write all five columns at full precision (reloads losslessly)."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "csv").lower()
    cols = {"t": traj.t, "x": traj.x, "y": traj.y, "v": traj.v, "heading": traj.heading}
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in zip(*cols.values()):
                w.writerow([repr(float(v)) for v in row])
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump({k: [float(v) for v in arr] for k, arr in cols.items()}, fh)
            fh.write("\n")
    else:
        raise TrajectoryFormatError(f"unsupported trajectory format {fmt!r}")
    return path
