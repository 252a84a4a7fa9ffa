"""Safety, comfort and efficiency criteria evaluated on trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from ._validation import check_array_1d, check_point, check_scalar
from .exceptions import AlignmentError, UnreachedGoalError, ValidationError

#: Upper bound on the shaping function; exp() overflows for overlaps beyond this.
BETA_CAP = 1e15
#: Gap used when no opponent is present.
ABSENT_OPPONENT_GAP = 1e3
DT_TOL = 1e-9


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    position: tuple
    speed: float
    heading: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled kinematic trajectory stored as column arrays."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray
    heading: np.ndarray

    def __post_init__(self):
        cols = {}
        for name in ("t", "x", "y", "v", "heading"):
            arr = check_array_1d(getattr(self, name), name, min_len=3).copy()
            arr.setflags(write=False)
            cols[name] = arr
        sizes = {a.size for a in cols.values()}
        if len(sizes) != 1:
            raise ValidationError("trajectory columns must have equal length")
        steps = np.diff(cols["t"])
        if np.any(steps <= 0):
            raise ValidationError("trajectory times must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > DT_TOL:
            raise ValidationError("trajectory times must be uniformly spaced")
        if np.any(cols["v"] < 0):
            raise ValidationError("trajectory speeds must be non-negative")
        for name, arr in cols.items():
            object.__setattr__(self, name, arr)

    @property
    def dt(self):
        return float((self.t[-1] - self.t[0]) / (len(self.t) - 1))

    def __len__(self):
        return len(self.t)

    def sample(self, i):
        return TrajectorySample(float(self.t[i]), (float(self.x[i]), float(self.y[i])),
                                float(self.v[i]), float(self.heading[i]))

    @property
    def samples(self):
        return [self.sample(i) for i in range(len(self))]

    def positions(self):
        return np.column_stack([self.x, self.y])

    def shifted(self, dt_offset):
        return Trajectory(self.t + dt_offset, self.x, self.y, self.v, self.heading)


@dataclass(frozen=True)
class ShapingParams:
    m_cap: float = 1.0
    slope: float = 5.0
    alpha: float = 0.5

    def __post_init__(self):
        check_scalar(self.m_cap, "m_cap", min_val=0, include_min=False)
        check_scalar(self.slope, "slope", min_val=1, include_min=False)
        check_scalar(self.alpha, "alpha", min_val=0, include_min=False)


@dataclass(frozen=True)
class ComfortThresholds:
    tau_longi: float = 0.9
    tau_lat: float = 0.9

    def __post_init__(self):
        check_scalar(self.tau_longi, "tau_longi", min_val=0, include_min=False)
        check_scalar(self.tau_lat, "tau_lat", min_val=0, include_min=False)


@dataclass(frozen=True, eq=False)
class InteractionSeries:
    t: np.ndarray
    values: np.ndarray
    intersecting: np.ndarray = field(default=None)
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.values)
        if self.intersecting is None:
            object.__setattr__(self, "intersecting", np.zeros(n, dtype=bool))
        if self.degenerate is None:
            object.__setattr__(self, "degenerate", np.zeros(n, dtype=bool))

    def __len__(self):
        return len(self.values)

    @property
    def worst_index(self):
        return int(np.argmax(self.values))

    @property
    def worst_value(self):
        return float(self.values[self.worst_index])


# --------------------------------------------------------------------------
# safety


def intersection_metric(ego, opp, n=None):
    """Overlap area when the zones intersect, minus the remaining gap otherwise."""
    if geo.classify(ego, opp, n) is geo.Relation.INTERSECTING:
        return geo.overlap_area(ego, opp, n)
    return -geo.min_gap(ego, opp, n)


def zone_params(traj, footprint, safety):
    """Per-sample ellipse parameter arrays ``(cx, cy, rx, ry, theta)``."""
    rx = 0.5 * footprint.length_m + safety.ttc_threshold_s * traj.v
    ry = np.full_like(rx, 0.5 * footprint.width_m + safety.lateral_margin_m)
    return (traj.x, traj.y, rx, ry, traj.heading)


def align(ego_traj, opp_traj):
    """Index arrays of the time steps both trajectories share."""
    if abs(ego_traj.dt - opp_traj.dt) > DT_TOL:
        raise AlignmentError(f"timestep mismatch: {ego_traj.dt} vs {opp_traj.dt}")
    dt = ego_traj.dt
    offset = (opp_traj.t[0] - ego_traj.t[0]) / dt
    k = round(offset)
    if abs(offset - k) > 1e-6:
        raise AlignmentError("trajectory time grids are not aligned")
    # ego index i pairs with opponent index i - k
    lo = max(0, k)
    hi = min(len(ego_traj), len(opp_traj) + k)
    if hi <= lo:
        raise AlignmentError("trajectories do not overlap in time")
    ego_idx = np.arange(lo, hi)
    return ego_idx, ego_idx - k


def interaction_series(ego_traj, opp_traj, ego_footprint, opp_footprint, safety):
    """Signed interaction metric at every common time step."""
    ei, oi = align(ego_traj, opp_traj)
    n = safety.boundary_samples
    ego = tuple(np.asarray(a)[ei] for a in zone_params(ego_traj, ego_footprint, safety))
    opp = tuple(np.asarray(a)[oi] for a in zone_params(opp_traj, opp_footprint, safety))
    hit = geo._classify(ego, opp, n)
    values = np.empty(len(ei))
    degenerate = np.zeros(len(ei), dtype=bool)
    sep = ~hit
    if sep.any():
        values[sep] = -geo._min_gap(tuple(a[sep] for a in ego), tuple(a[sep] for a in opp), n)
    for j in np.flatnonzero(hit):
        poly = geo._overlap_polygon(tuple(a[j] for a in ego), tuple(a[j] for a in opp), n)
        degenerate[j] = poly.degenerate
        values[j] = geo.shoelace_area(poly)
    return InteractionSeries(ego_traj.t[ei].copy(), values, hit, degenerate)


def absent_series(traj, gap=ABSENT_OPPONENT_GAP):
    return InteractionSeries(traj.t.copy(), np.full(len(traj), -float(gap)))


def shaping_beta(x, sp=ShapingParams()):
    """Map a (worst-case) interaction value to a positive safety cost.

    Algebraic decay with exponent ``alpha`` for separated configurations,
    exponential growth for overlaps; value ``m_cap`` and slope ``slope`` at 0.
    Values are capped at :data:`BETA_CAP`.
    """
    x_arr = np.asarray(x, dtype=float)
    m, p, a = sp.m_cap, sp.slope, sp.alpha
    neg = np.minimum(x_arr, 0.0)
    pos = np.maximum(x_arr, 0.0)
    with np.errstate(over="ignore"):
        out = np.where(x_arr <= 0.0,
                       m * (1.0 - p * neg / (m * a)) ** (-a),
                       m * np.exp(np.minimum(p / m * pos, 745.0)))
    out = np.minimum(out, BETA_CAP)
    return float(out) if out.ndim == 0 else out


def safety_criterion(series, sp=ShapingParams(), scale=1.0):
    if len(series) == 0:
        raise ValidationError("interaction series is empty")
    return shaping_beta(scale * series.worst_value, sp)


# --------------------------------------------------------------------------
# comfort


def _check_interior(traj, i):
    if not 1 <= i <= len(traj) - 2:
        raise IndexError(f"jerk needs both neighbours; index {i} outside [1, {len(traj) - 2}]")


def longitudinal_jerk(traj, i):
    _check_interior(traj, i)
    return float(jerk_profiles(traj)[0][i - 1])


def lateral_jerk(traj, i):
    _check_interior(traj, i)
    return float(jerk_profiles(traj)[1][i - 1])


def jerk_profiles(traj):
    """Longitudinal and lateral jerk at interior samples ``1 .. len-2`` (central differences)."""
    dt = traj.dt
    v = traj.v
    h = np.unwrap(traj.heading)
    dv2 = (v[2:] - v[1:-1]) - (v[1:-1] - v[:-2])
    dh2 = (h[2:] - h[1:-1]) - (h[1:-1] - h[:-2])
    rate = (h[2:] - h[:-2]) / (2.0 * dt)
    j_long = dv2 / dt**2 - v[1:-1] * rate**2
    j_lat = (v[2:] - v[:-2]) / dt * rate + v[1:-1] * dh2 / dt**2
    return j_long, j_lat


def comfort_constraints(traj, th=ComfortThresholds()):
    """Signed jerk margins; negative values satisfy the comfort limits."""
    j_long, j_lat = jerk_profiles(traj)
    return (float(np.max(np.abs(j_long))) - th.tau_longi,
            float(np.max(np.abs(j_lat))) - th.tau_lat)


# --------------------------------------------------------------------------
# efficiency


def goal_index(traj, goal, goal_radius_m):
    """Index of the first sample within the goal radius, or ``None``."""
    gx, gy = check_point(goal, "goal")
    check_scalar(goal_radius_m, "goal_radius_m", min_val=0, include_min=False)
    inside = np.flatnonzero(np.hypot(traj.x - gx, traj.y - gy) <= goal_radius_m)
    return int(inside[0]) if inside.size else None


def travel_time(traj, goal, goal_radius_m=1.0):
    k = goal_index(traj, goal, goal_radius_m)
    if k is None:
        raise UnreachedGoalError(f"trajectory never comes within {goal_radius_m} m of {tuple(goal)}")
    if k == 0:
        raise ValidationError("trajectory starts inside the goal radius; travel time must be positive")
    return float(traj.t[k] - traj.t[0])


def distance_to_goal(traj, goal):
    gx, gy = check_point(goal, "goal")
    return float(math.hypot(traj.x[-1] - gx, traj.y[-1] - gy))
