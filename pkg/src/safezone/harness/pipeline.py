"""Scoring recorded trajectories and running the optimizer on a scenario."""
from __future__ import annotations

import dataclasses

import numpy as np

from .. import metrics
from ..objective import criteria_report
from ..optimizer import optimize_maneuver
from .report import EvaluationReport, longest_stop

SPEED_TOL = 1e-9


def _opponent_for(scenario, ego_traj):
    """Opponent trajectory to pair with ``ego_traj``.

    Path-driven opponents are generated on the ego's own time grid so any
    uniformly sampled ego trajectory can be scored.
    """
    if scenario.opponent is None:
        return None
    return scenario.opponent.on_grid(ego_traj.t)


def build_report(scenario, ego_traj, label="ego", rollout=None, extra=None):
    opp = _opponent_for(scenario, ego_traj)
    if opp is None:
        series = metrics.absent_series(ego_traj)
    else:
        series = metrics.interaction_series(ego_traj, opp, scenario.ego_footprint,
                                            scenario.opp_footprint, scenario.safety)
    crit = criteria_report(ego_traj, series, scenario.objective, scenario.limits.v_max)
    j_long, j_lat = metrics.jerk_profiles(ego_traj)
    if rollout is not None:
        low, high, eop = rollout.saturated_low, rollout.saturated_high, rollout.end_of_path
    else:
        low = bool(np.any(ego_traj.v[1:] <= SPEED_TOL) and np.any(np.diff(ego_traj.v) < 0))
        high = bool(np.any(ego_traj.v >= scenario.limits.v_max - SPEED_TOL))
        eop = False
    return EvaluationReport(
        label=label, criteria=crit,
        int_t=series.t.copy(), int_values=series.values.copy(),
        intersecting=np.asarray(series.intersecting, dtype=bool).copy(),
        jerk_t=ego_traj.t[1:-1].copy(), j_long=j_long, j_lat=j_lat,
        speed_t=ego_traj.t.copy(), speed=ego_traj.v.copy(),
        stop_duration_s=longest_stop(ego_traj.t, ego_traj.v),
        saturated_low=low, saturated_high=high, end_of_path=eop,
        opponent_present=opp is not None, extra=dict(extra or {}))


def evaluate(scenario, ego_trajectory, label="ego"):
    """All criteria for a given (not optimized) ego trajectory."""
    return build_report(scenario, ego_trajectory, label)


def baseline_report(scenario):
    """Ego holding its start speed along the path: no decision making."""
    problem = scenario.problem()
    rollout = problem.rollout(problem.candidate(np.full(scenario.n_knots, scenario.ego_start.a)))
    return build_report(scenario, rollout.trajectory, "baseline", rollout), rollout


def run_optimize(scenario, with_opponent=True):
    """Optimize the ego maneuver; returns ``(result, report, baseline)``."""
    problem = scenario.problem(with_opponent=with_opponent)
    result = optimize_maneuver(problem, scenario.pso)
    extra = {"knots": result.best_x, "best_q": result.best_q,
             "evaluations": result.evaluations, "history": result.history,
             "stopped_early": result.stopped_early, "seed": scenario.pso.seed}
    report = build_report(scenario if with_opponent else _without_opponent(scenario),
                          result.rollout.trajectory, "optimized", result.rollout, extra)
    baseline, _ = baseline_report(scenario)
    return result, report, baseline


def _without_opponent(scenario):
    return dataclasses.replace(scenario, opponent=None)


def compare(scenario, trajectories):
    """Score ``(label, trajectory)`` pairs and rank them by Q (lowest first)."""
    reports = [evaluate(scenario, traj, label) for label, traj in trajectories]
    order = sorted(range(len(reports)), key=lambda i: (reports[i].q, i))
    return [reports[i] for i in order]
