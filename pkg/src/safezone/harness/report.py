"""Evaluation reports and their JSON / CSV serialization.

Floats are written with 12 significant digits and keys in a fixed order, so
two runs with identical inputs produce byte-identical files.  Non-finite
numbers are written as the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ..exceptions import ValidationError
from ..objective import CriteriaReport

REPORT_FORMAT = "safezone.report/1"
SIGNIFICANT_DIGITS = 12
#: Speeds at or below this count as stationary when measuring stops.
STOP_SPEED = 1e-6

CSV_HEADERS = {
    "int_series.csv": ("t", "int_value"),
    "jerk.csv": ("t", "j_long", "j_lat"),
    "speed.csv": ("t", "v"),
}


def fmt_float(x):
    """Round to 12 significant digits; non-finite values become strings."""
    x = float(x)
    if math.isfinite(x):
        return float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def parse_float(v):
    return float(v)  # float() accepts "inf", "-inf" and "nan"


def to_jsonable(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def dumps(doc):
    return json.dumps(to_jsonable(doc), indent=2, allow_nan=False) + "\n"


def longest_stop(t, v, threshold=STOP_SPEED):
    """Duration of the longest contiguous run of samples with ``v <= threshold``."""
    v = np.asarray(v)
    if len(v) == 0:
        return 0.0
    still = np.concatenate([[0], (v <= threshold).astype(np.int8), [0]])
    edges = np.flatnonzero(np.diff(still))
    best = 0.0
    for start, stop in zip(edges[::2], edges[1::2]):
        best = max(best, float(t[stop - 1] - t[start]))
    return best


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """All criteria for one ego trajectory, plus the curves behind them."""

    label: str
    criteria: CriteriaReport
    int_t: np.ndarray
    int_values: np.ndarray
    intersecting: np.ndarray
    jerk_t: np.ndarray
    j_long: np.ndarray
    j_lat: np.ndarray
    speed_t: np.ndarray
    speed: np.ndarray
    stop_duration_s: float = 0.0
    saturated_low: bool = False
    saturated_high: bool = False
    end_of_path: bool = False
    opponent_present: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def q(self):
        return self.criteria.q

    @property
    def worst_index(self):
        return int(np.argmax(self.int_values)) if len(self.int_values) else None

    @property
    def flags(self):
        c = self.criteria
        return {
            "goal_reached": c.goal_reached,
            "saturated_low": self.saturated_low,
            "saturated_high": self.saturated_high,
            "end_of_path": self.end_of_path,
            "penalty_capped": c.penalty_capped,
            "degenerate_overlaps": c.degenerate_overlaps,
            "opponent_present": self.opponent_present,
        }

    def to_dict(self):
        return {
            "format": REPORT_FORMAT,
            "label": self.label,
            "criteria": asdict(self.criteria),
            "flags": self.flags,
            "worst_index": self.worst_index,
            "stop_duration_s": self.stop_duration_s,
            "int_series": {"t": self.int_t, "int_value": self.int_values,
                           "intersecting": self.intersecting},
            "jerk": {"t": self.jerk_t, "j_long": self.j_long, "j_lat": self.j_lat},
            "speed": {"t": self.speed_t, "v": self.speed},
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != REPORT_FORMAT:
            raise ValidationError(f"not a {REPORT_FORMAT} document")
        names = {f.name for f in fields(CriteriaReport)}
        crit = {k: v for k, v in doc["criteria"].items() if k in names}
        for k, v in crit.items():
            if isinstance(v, str):
                crit[k] = parse_float(v)

        def arr(values, dtype=float):
            return np.array([parse_float(v) if dtype is float else v for v in values], dtype=dtype)

        flags = doc["flags"]
        return cls(
            label=doc["label"], criteria=CriteriaReport(**crit),
            int_t=arr(doc["int_series"]["t"]), int_values=arr(doc["int_series"]["int_value"]),
            intersecting=arr(doc["int_series"]["intersecting"], bool),
            jerk_t=arr(doc["jerk"]["t"]), j_long=arr(doc["jerk"]["j_long"]),
            j_lat=arr(doc["jerk"]["j_lat"]),
            speed_t=arr(doc["speed"]["t"]), speed=arr(doc["speed"]["v"]),
            stop_duration_s=parse_float(doc["stop_duration_s"]),
            saturated_low=flags["saturated_low"], saturated_high=flags["saturated_high"],
            end_of_path=flags["end_of_path"], opponent_present=flags["opponent_present"],
            extra=doc.get("extra", {}))


def _write(path, text):
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _cell(v):
    f = fmt_float(v)
    return repr(f) if isinstance(f, float) else f


def _csv_text(header, columns):
    lines = [",".join(header)]
    lines += [",".join(_cell(v) for v in row) for row in zip(*columns)]
    return "\n".join(lines) + "\n"


def emit_report(report, fmt, out_dir, stem="report"):
    """Write ``report`` as ``<stem>.json`` or as the three-file CSV bundle.

    Returns the list of written paths.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    if fmt == "json":
        return [_write(out / f"{stem}.json", dumps(report.to_dict()))]
    if fmt in ("csv", "csv-bundle"):
        cols = {
            "int_series.csv": (report.int_t, report.int_values),
            "jerk.csv": (report.jerk_t, report.j_long, report.j_lat),
            "speed.csv": (report.speed_t, report.speed),
        }
        return [_write(out / name, _csv_text(CSV_HEADERS[name], data))
                for name, data in cols.items()]
    raise ValidationError(f"unknown report format {fmt!r} (expected json or csv)")


def load_report(path):
    with open(path) as fh:
        return EvaluationReport.from_dict(json.load(fh))
