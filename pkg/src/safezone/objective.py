"""Longitudinal rollout of acceleration profiles and the penalized objective Q."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from ._validation import check_array_1d, check_point, check_scalar
from .exceptions import ValidationError
from .geometry import SafetyParams, VehicleFootprint
from .metrics import ComfortThresholds, ShapingParams, Trajectory

#: Saturation value of the penalty function.
PSI_CAP = 1e15


@dataclass(frozen=True)
class VehicleState:
    s: float
    v: float
    a: float = 0.0

    def __post_init__(self):
        check_scalar(self.s, "s")
        check_scalar(self.a, "a")
        if check_scalar(self.v, "v") < 0:
            raise ValidationError(f"speed must be non-negative, got {self.v}")


@dataclass(frozen=True, eq=False)
class ReferencePath:
    """Polyline path parameterized by arc length."""

    waypoints: np.ndarray
    arc_length: np.ndarray = field(init=False)
    headings: np.ndarray = field(init=False)

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=float)
        if wp.ndim != 2 or wp.shape[1] != 2 or len(wp) < 2:
            raise ValidationError("a reference path needs at least two 2D waypoints")
        if not np.all(np.isfinite(wp)):
            raise ValidationError("waypoints must be finite")
        seg = np.diff(wp, axis=0)
        s = np.concatenate([[0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))])
        if np.any(np.diff(s) <= 0):
            raise ValidationError("waypoints must be distinct (arc length strictly increasing)")
        gx = np.gradient(wp[:, 0], s)
        gy = np.gradient(wp[:, 1], s)
        for name, arr in (("waypoints", wp), ("arc_length", s),
                          ("headings", np.unwrap(np.arctan2(gy, gx)))):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def straight(cls, start, heading, length):
        start = check_point(start, "start")
        length = check_scalar(length, "length", min_val=0, include_min=False)
        end = start + length * np.array([math.cos(heading), math.sin(heading)])
        return cls(np.vstack([start, end]))

    @property
    def length(self):
        return float(self.arc_length[-1])

    def point_at(self, s):
        s = np.asarray(s, dtype=float)
        x = np.interp(s, self.arc_length, self.waypoints[:, 0])
        y = np.interp(s, self.arc_length, self.waypoints[:, 1])
        h = np.interp(s, self.arc_length, self.headings)
        return x, y, h

    def project(self, p):
        """Arc length of the path point closest to ``p``."""
        p = check_point(p)
        a, b = self.waypoints[:-1], self.waypoints[1:]
        ab = b - a
        tt = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0, 1)
        closest = a + tt[:, None] * ab
        k = int(np.argmin(np.hypot(*(closest - p).T)))
        return float(self.arc_length[k] + tt[k] * (self.arc_length[k + 1] - self.arc_length[k]))


@dataclass(frozen=True)
class Limits:
    a_min: float = -3.0
    a_max: float = 2.0
    v_max: float = 13.9
    # jerk used to round off the approach to v = 0 and v = v_max; None clamps hard
    saturation_jerk: float | None = None

    def __post_init__(self):
        check_scalar(self.a_min, "a_min", max_val=0, include_max=False)
        check_scalar(self.a_max, "a_max", min_val=0, include_min=False)
        check_scalar(self.v_max, "v_max", min_val=0, include_min=False)
        if self.saturation_jerk is not None:
            check_scalar(self.saturation_jerk, "saturation_jerk", min_val=0, include_min=False)


@dataclass(frozen=True, eq=False)
class ManeuverCandidate:
    """Acceleration knots spread uniformly over the horizon, ``knot_dt`` apart.

    With ``hold="zero"`` knot ``k`` holds over ``[k * knot_dt, (k + 1) * knot_dt)``.
    With ``hold="linear"`` knot ``k`` sits at ``(k + 1) * knot_dt`` and the
    profile is interpolated linearly, starting from ``a0`` at ``t = 0``; this
    keeps the acceleration continuous, so jerk stays bounded.
    """

    accel_knots: np.ndarray
    horizon_s: float
    hold: str = "zero"
    a0: float = 0.0

    def __post_init__(self):
        knots = check_array_1d(self.accel_knots, "accel_knots").copy()
        knots.setflags(write=False)
        object.__setattr__(self, "accel_knots", knots)
        check_scalar(self.horizon_s, "horizon_s", min_val=0, include_min=False)
        if self.hold not in ("linear", "zero"):
            raise ValidationError(f"hold must be 'linear' or 'zero', got {self.hold!r}")
        check_scalar(self.a0, "a0")

    @property
    def knot_dt(self):
        return self.horizon_s / len(self.accel_knots)

    def accel_at(self, t):
        t = np.asarray(t, dtype=float)
        if self.hold == "linear":
            times = np.arange(len(self.accel_knots) + 1) * self.knot_dt
            return np.interp(t, times, np.concatenate([[self.a0], self.accel_knots]))
        k = np.clip(np.floor(t / self.knot_dt + 1e-9).astype(int), 0, len(self.accel_knots) - 1)
        return self.accel_knots[k]

    def check_bounds(self, limits):
        if np.any(self.accel_knots < limits.a_min) or np.any(self.accel_knots > limits.a_max):
            raise ValidationError("acceleration knots outside [a_min, a_max]")


@dataclass(frozen=True)
class Rollout:
    trajectory: Trajectory
    s: np.ndarray
    accel: np.ndarray
    saturated_low: bool
    saturated_high: bool
    end_of_path: bool


def _envelope(headroom, jerk, dt):
    # largest acceleration magnitude that still lets v reach the bound with
    # second differences of v equal to jerk * dt**2
    c = jerk * dt * dt
    k = 0.5 * (math.sqrt(1.0 + 8.0 * max(headroom, 0.0) / c) - 1.0)
    return jerk * dt * k


def integrate_dynamics(start, cand, path, limits, dt=0.1):
    """Semi-implicit Euler rollout of ``s' = v, v' = a`` along ``path``.

    Speed is kept in ``[0, v_max]``.  With ``limits.saturation_jerk`` set, the
    acceleration is additionally limited near both bounds so that the speed
    reaches them with a bounded jerk instead of a hard clamp.
    """
    dt = check_scalar(dt, "dt", min_val=0, include_min=False)
    if dt > cand.knot_dt + 1e-12:
        raise ValidationError(f"dt ({dt}) must not exceed the knot interval ({cand.knot_dt})")
    if not 0.0 <= start.s <= path.length:
        raise ValidationError("start arc length lies outside the reference path")
    steps = int(round(cand.horizon_s / dt))
    t = np.arange(steps + 1) * dt
    a_cmd = cand.accel_at(t)
    s = np.empty(steps + 1)
    v = np.empty(steps + 1)
    a_used = np.zeros(steps + 1)
    s[0], v[0] = start.s, min(start.v, limits.v_max)
    low = high = False
    jerk = limits.saturation_jerk
    last = steps
    for i in range(steps):
        a = float(a_cmd[i])
        if jerk is not None:
            lo_env = -_envelope(v[i], jerk, dt)
            hi_env = _envelope(limits.v_max - v[i], jerk, dt)
            if a < lo_env:
                a, low = lo_env, True
            elif a > hi_env:
                a, high = hi_env, True
        vn = v[i] + a * dt
        if vn <= 0.0:
            vn, low = 0.0, low or a < 0
        elif vn >= limits.v_max:
            vn, high = limits.v_max, True
        a_used[i] = (vn - v[i]) / dt
        v[i + 1] = vn
        s[i + 1] = s[i] + vn * dt
        if s[i + 1] > path.length:
            last = i
            break
    end_of_path = last < steps
    if end_of_path:
        if last < 2:
            raise ValidationError("reference path ends before three samples could be simulated")
        n = last + 1
        t, s, v, a_used = t[:n], s[:n], v[:n], a_used[:n]
    x, y, h = path.point_at(s)
    traj = Trajectory(t, x, y, v, h)
    return Rollout(traj, s, a_used, low, high, end_of_path)


def penalty_psi(x, m=1.0, p=5.0):
    """Soft-constraint penalty: zero for ``x < 0``, ``(exp(m*p*x) - 1)/m`` otherwise.

    Saturates at :data:`PSI_CAP`.
    """
    m = check_scalar(m, "m", min_val=0, include_min=False)
    p = check_scalar(p, "p", min_val=1, include_min=False)
    x = float(x)
    if x < 0:
        return 0.0
    z = m * p * x
    if z >= math.log1p(m * PSI_CAP):
        return PSI_CAP
    return math.expm1(z) / m


@dataclass(frozen=True)
class ObjectiveParams:
    goal: tuple
    goal_radius_m: float = 1.0
    w_time: float = 1.0
    w_safe: float = 1.0
    shaping: ShapingParams = ShapingParams()
    penalties: tuple = ((1.0, 5.0), (1.0, 5.0))
    thresholds: ComfortThresholds = ComfortThresholds()
    safety: SafetyParams = field(default_factory=SafetyParams)
    int_scale: float = 1.0

    def __post_init__(self):
        goal = check_point(self.goal, "goal")
        object.__setattr__(self, "goal", (float(goal[0]), float(goal[1])))
        check_scalar(self.goal_radius_m, "goal_radius_m", min_val=0, include_min=False)
        check_scalar(self.w_time, "w_time", min_val=0, include_min=False)
        check_scalar(self.w_safe, "w_safe", min_val=0, include_min=False)
        check_scalar(self.int_scale, "int_scale", min_val=0, include_min=False)
        pens = tuple((check_scalar(m, "penalty M", min_val=0, include_min=False),
                      check_scalar(p, "penalty p", min_val=1, include_min=False))
                     for m, p in self.penalties)
        if len(pens) != 2:
            raise ValidationError("expected two (M, p) penalty pairs: longitudinal and lateral jerk")
        object.__setattr__(self, "penalties", pens)


@dataclass(frozen=True)
class CriteriaReport:
    t_global: float
    goal_reached: bool
    int_max: float
    worst_time: float
    c_safe: float
    c_longi: float
    c_lat: float
    time_term: float
    safety_term: float
    penalty_longi: float
    penalty_lat: float
    q: float
    penalty_capped: bool = False
    degenerate_overlaps: int = 0

    def terms_sum(self):
        return self.time_term + self.safety_term + self.penalty_longi + self.penalty_lat


def criteria_report(ego_traj, series, params, v_ref):
    """Score a trajectory given its interaction series.

    An unreached goal is charged the elapsed time plus the remaining distance
    covered at ``v_ref``.
    """
    k = metrics.goal_index(ego_traj, params.goal, params.goal_radius_m)
    if k is not None and k > 0:
        t_global = float(ego_traj.t[k] - ego_traj.t[0])
        reached = True
    else:
        # k == 0 also lands here: a zero-duration maneuver is not admissible
        remaining = metrics.distance_to_goal(ego_traj, params.goal)
        t_global = float(ego_traj.t[-1] - ego_traj.t[0]) + remaining / v_ref
        reached = False
    c_safe = metrics.safety_criterion(series, params.shaping, params.int_scale)
    c_longi, c_lat = metrics.comfort_constraints(ego_traj, params.thresholds)
    (m1, p1), (m2, p2) = params.penalties
    pen_longi = penalty_psi(c_longi, m1, p1)
    pen_lat = penalty_psi(c_lat, m2, p2)
    time_term = params.w_time * t_global
    safety_term = params.w_safe * c_safe
    q = time_term + safety_term + pen_longi + pen_lat
    return CriteriaReport(
        t_global=t_global, goal_reached=reached,
        int_max=series.worst_value, worst_time=float(series.t[series.worst_index]),
        c_safe=c_safe, c_longi=c_longi, c_lat=c_lat,
        time_term=time_term, safety_term=safety_term,
        penalty_longi=pen_longi, penalty_lat=pen_lat, q=q,
        penalty_capped=max(pen_longi, pen_lat) >= PSI_CAP,
        degenerate_overlaps=int(np.count_nonzero(series.degenerate)))


@dataclass(frozen=True)
class ManeuverProblem:
    """Everything needed to score an ego acceleration profile.

    ``opponent`` is a :class:`Trajectory` on the same time grid as the rollout,
    or ``None`` for an empty road.
    """

    start: VehicleState
    path: ReferencePath
    limits: Limits
    ego_footprint: VehicleFootprint
    params: ObjectiveParams
    opponent: Trajectory | None = None
    opp_footprint: VehicleFootprint | None = None
    dt: float = 0.1
    horizon_s: float = 15.0
    n_knots: int = 10
    hold: str = "zero"

    def __post_init__(self):
        if self.opponent is not None and self.opp_footprint is None:
            raise ValidationError("an opponent trajectory needs an opponent footprint")
        check_scalar(self.n_knots, "n_knots", min_val=1, integer=True)

    def candidate(self, knots):
        return ManeuverCandidate(np.asarray(knots, dtype=float), self.horizon_s, self.hold,
                                 self.start.a)

    @property
    def bounds(self):
        lo = np.full(self.n_knots, self.limits.a_min)
        hi = np.full(self.n_knots, self.limits.a_max)
        return lo, hi

    def rollout(self, cand):
        return integrate_dynamics(self.start, cand, self.path, self.limits, self.dt)

    def series(self, traj):
        if self.opponent is None:
            return metrics.absent_series(traj)
        return metrics.interaction_series(traj, self.opponent, self.ego_footprint,
                                          self.opp_footprint, self.params.safety)

    def score(self, traj):
        return criteria_report(traj, self.series(traj), self.params, self.limits.v_max)


def objective_q(cand, problem):
    """Roll out ``cand`` and return ``(q, report)``; never raises on infeasibility."""
    traj = problem.rollout(cand).trajectory
    report = problem.score(traj)
    return report.q, report
