"""Adaptive elliptical safety zones and the spatial relations between two of them.

Every public function takes :class:`SafetyEllipse` instances.  The underscore
kernels below work on plain parameter arrays ``(cx, cy, rx, ry, theta)`` and
broadcast over a leading batch axis, which is what the time-series code in
:mod:`safezone.metrics` uses to evaluate a whole trajectory at once.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_boundary_samples, check_point, check_scalar, wrap_angle
from .exceptions import DegenerateInputError, PreconditionError, ValidationError

#: Environment variable overriding the default number of boundary samples.
BOUNDARY_SAMPLES_ENV = "SAFEZONE_BOUNDARY_SAMPLES"
#: Slack on the unit normalized-delta norm when testing containment.
CONTAINMENT_TOL = 1e-9
#: Vertices closer than this are merged before the angular sort.
DEDUP_TOL = 1e-9


def default_boundary_samples():
    raw = os.environ.get(BOUNDARY_SAMPLES_ENV)
    if raw is None or raw.strip() == "":
        return 64
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{BOUNDARY_SAMPLES_ENV} must be an integer, got {raw!r}") from None
    return check_boundary_samples(value)


class Relation(enum.Enum):
    SEPARATED = "separated"
    INTERSECTING = "intersecting"


@dataclass(frozen=True)
class VehicleFootprint:
    length_m: float
    width_m: float

    def __post_init__(self):
        length = check_scalar(self.length_m, "length_m", min_val=0, include_min=False)
        width = check_scalar(self.width_m, "width_m", min_val=0, include_min=False)
        if length < width:
            raise ValidationError(
                f"vehicle length ({length}) must not be smaller than its width ({width})")
        object.__setattr__(self, "length_m", length)
        object.__setattr__(self, "width_m", width)


@dataclass(frozen=True)
class SafetyParams:
    ttc_threshold_s: float = 2.0
    lateral_margin_m: float = 0.5
    boundary_samples: int = field(default_factory=default_boundary_samples)

    def __post_init__(self):
        object.__setattr__(self, "ttc_threshold_s", check_scalar(
            self.ttc_threshold_s, "ttc_threshold_s", min_val=0, include_min=False))
        object.__setattr__(self, "lateral_margin_m", check_scalar(
            self.lateral_margin_m, "lateral_margin_m", min_val=0))
        object.__setattr__(self, "boundary_samples", check_boundary_samples(self.boundary_samples))


@dataclass(frozen=True)
class SafetyEllipse:
    """Oriented ellipse; ``rotation_rad`` is the direction of the major axis."""

    center: tuple
    semi_major_m: float
    semi_minor_m: float
    rotation_rad: float = 0.0

    def __post_init__(self):
        cx, cy = check_point(self.center, "center")
        rx = check_scalar(self.semi_major_m, "semi_major_m", min_val=0, include_min=False)
        ry = check_scalar(self.semi_minor_m, "semi_minor_m", min_val=0, include_min=False)
        if rx < ry:
            raise ValidationError(f"semi_major_m ({rx}) must be >= semi_minor_m ({ry})")
        object.__setattr__(self, "center", (float(cx), float(cy)))
        object.__setattr__(self, "semi_major_m", rx)
        object.__setattr__(self, "semi_minor_m", ry)
        object.__setattr__(self, "rotation_rad", wrap_angle(
            check_scalar(self.rotation_rad, "rotation_rad")))

    @property
    def params(self):
        return (self.center[0], self.center[1], self.semi_major_m, self.semi_minor_m,
                self.rotation_rad)

    @property
    def area(self):
        return math.pi * self.semi_major_m * self.semi_minor_m


@dataclass(frozen=True)
class OverlapPolygon:
    vertices: np.ndarray
    centroid: np.ndarray
    n_collected: int = 0

    @property
    def degenerate(self):
        return len(self.vertices) < 3


# --------------------------------------------------------------------------
# vectorized kernels: arguments are arrays that broadcast against each other


def _to_local(cx, cy, rx, ry, th, px, py):
    c, s = np.cos(th), np.sin(th)
    dx, dy = px - cx, py - cy
    return (c * dx + s * dy) / rx, (-s * dx + c * dy) / ry


def _from_local(cx, cy, rx, ry, th, u, w):
    c, s = np.cos(th), np.sin(th)
    return cx + c * rx * u - s * ry * w, cy + s * rx * u + c * ry * w


def _boundary(cx, cy, rx, ry, th, n):
    """Boundary samples with shape ``batch + (n,)``."""
    phi = 2.0 * np.pi * np.arange(n) / n
    expand = [np.asarray(a, dtype=float)[..., None] for a in (cx, cy, rx, ry, th)]
    return _from_local(*expand, np.cos(phi), np.sin(phi))


def _project(cx, cy, rx, ry, th, px, py):
    u, w = _to_local(cx, cy, rx, ry, th, px, py)
    r = np.hypot(u, w)
    return _from_local(cx, cy, rx, ry, th, u / r, w / r)


def _expand(params):
    return [np.asarray(a, dtype=float)[..., None] for a in params]


def _classify(ego, opp, n):
    """Boolean intersecting mask for batched ellipse parameter tuples."""
    e, o = _expand(ego), _expand(opp)
    ox, oy = _boundary(*opp, n)
    ex, ey = _boundary(*ego, n)
    inside_ego = np.hypot(*_to_local(*e, ox, oy)) <= 1.0 + CONTAINMENT_TOL
    inside_opp = np.hypot(*_to_local(*o, ex, ey)) <= 1.0 + CONTAINMENT_TOL
    opp_center_in = np.hypot(*_to_local(*ego, opp[0], opp[1])) <= 1.0 + CONTAINMENT_TOL
    ego_center_in = np.hypot(*_to_local(*opp, ego[0], ego[1])) <= 1.0 + CONTAINMENT_TOL
    return inside_ego.any(axis=-1) | inside_opp.any(axis=-1) | opp_center_in | ego_center_in


def _min_gap(ego, opp, n):
    e, o = _expand(ego), _expand(opp)
    ox, oy = _boundary(*opp, n)
    ex, ey = _boundary(*ego, n)
    # opponent samples projected onto the ego zone, and vice versa
    pvx, pvy = _project(*e, ox, oy)
    pox, poy = _project(*o, ex, ey)
    jv = np.argmin(np.hypot(pvx - ox, pvy - oy), axis=-1)[..., None]
    jo = np.argmin(np.hypot(ex - pox, ey - poy), axis=-1)[..., None]
    nvx = np.take_along_axis(pvx, jv, -1)[..., 0]
    nvy = np.take_along_axis(pvy, jv, -1)[..., 0]
    nox = np.take_along_axis(pox, jo, -1)[..., 0]
    noy = np.take_along_axis(poy, jo, -1)[..., 0]
    return np.hypot(nvx - nox, nvy - noy)


def _check_separated(ego, opp, n):
    if classify(ego, opp, n) is Relation.INTERSECTING:
        raise PreconditionError("distance is only defined for separated safety zones")


def _polygon_from_points(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n_collected = len(pts)
    if n_collected:
        d = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
        dup = np.triu(d <= DEDUP_TOL, k=1).any(axis=0)
        pts = pts[~dup]
    if len(pts) == 0:
        return OverlapPolygon(np.empty((0, 2)), np.full(2, np.nan), n_collected)
    centroid = pts.mean(axis=0)
    rel = pts - centroid
    order = np.lexsort((np.hypot(rel[:, 0], rel[:, 1]), np.arctan2(rel[:, 1], rel[:, 0])))
    return OverlapPolygon(pts[order], centroid, n_collected)


# --------------------------------------------------------------------------
# public operations


def adaptive_ellipse(footprint, pose, speed, params):
    """Safety zone of a vehicle at ``pose = (x, y, heading)`` moving at ``speed``.

    The major semi-axis is half the vehicle length plus the distance covered in
    ``params.ttc_threshold_s`` seconds; the minor semi-axis is half the width
    plus the lateral margin.
    """
    speed = check_scalar(speed, "speed")
    if speed < 0:
        raise ValidationError(f"speed must be non-negative, got {speed}")
    x, y, heading = (check_scalar(v, "pose") for v in pose)
    rx = 0.5 * footprint.length_m + params.ttc_threshold_s * speed
    ry = 0.5 * footprint.width_m + params.lateral_margin_m
    return SafetyEllipse((x, y), rx, ry, heading)


def sample_boundary(e, n):
    """``n`` boundary points at parameter angles ``2*pi*k/n``; point 0 is on the major axis."""
    n = check_scalar(n, "n", min_val=3, integer=True)
    x, y = _boundary(*e.params, n)
    return np.column_stack([x, y])


def normalized_delta(e, p):
    """Offset of ``p`` from the center in the ellipse frame, scaled by the semi-axes.

    Its norm is below one inside the ellipse, one on the boundary.
    """
    px, py = check_point(p)
    return np.array(_to_local(*e.params, px, py))


def radial_projection(e, p):
    px, py = check_point(p)
    u, w = _to_local(*e.params, px, py)
    if math.hypot(u, w) == 0.0:
        raise DegenerateInputError("cannot project the ellipse center onto its boundary")
    return np.array(_project(*e.params, px, py))


def classify(ego, opp, n=None):
    n = _resolve_n(n)
    hit = _classify(ego.params, opp.params, n)
    return Relation.INTERSECTING if bool(hit) else Relation.SEPARATED


def brute_force_distance(ego, opp, n=None):
    """Exhaustive O(n^2) minimum over pairs of radially projected samples."""
    n = _resolve_n(n)
    _check_separated(ego, opp, n)
    ox, oy = _boundary(*opp.params, n)
    ex, ey = _boundary(*ego.params, n)
    pvx, pvy = _project(*ego.params, ox, oy)
    pox, poy = _project(*opp.params, ex, ey)
    return float(np.hypot(pvx[:, None] - pox[None, :], pvy[:, None] - poy[None, :]).min())


def min_gap(ego, opp, n=None):
    """O(n) remaining gap between two separated safety zones.

    Picks the opponent sample whose radial projection onto the ego zone moves
    it the least (and symmetrically for the ego samples), and returns the
    distance between the two projected points.
    """
    n = _resolve_n(n)
    _check_separated(ego, opp, n)
    return float(_min_gap(ego.params, opp.params, n))


def overlap_polygon(ego, opp, n=None):
    n = _resolve_n(n)
    if classify(ego, opp, n) is Relation.SEPARATED:
        raise PreconditionError("overlap polygon requires intersecting safety zones")
    return _overlap_polygon(ego.params, opp.params, n)


def _overlap_polygon(ego, opp, n):
    ox, oy = _boundary(*opp, n)
    ex, ey = _boundary(*ego, n)
    opp_in = np.hypot(*_to_local(*ego, ox, oy)) <= 1.0 + CONTAINMENT_TOL
    ego_in = np.hypot(*_to_local(*opp, ex, ey)) <= 1.0 + CONTAINMENT_TOL
    pts = np.concatenate([np.column_stack([ox[opp_in], oy[opp_in]]),
                          np.column_stack([ex[ego_in], ey[ego_in]])])
    return _polygon_from_points(pts)


def shoelace_area(poly):
    """Polygon area from ordered vertices (an :class:`OverlapPolygon` or an (m, 2) array)."""
    v = poly.vertices if isinstance(poly, OverlapPolygon) else np.asarray(poly, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    # fsum is correctly rounded, so the result does not depend on the starting vertex
    return 0.5 * abs(math.fsum(x * yn - y * xn))


def overlap_area(ego, opp, n=None):
    return shoelace_area(overlap_polygon(ego, opp, n))


def _resolve_n(n):
    return default_boundary_samples() if n is None else check_boundary_samples(n)
