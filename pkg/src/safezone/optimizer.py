"""Seeded global-best particle swarm and the maneuver optimizer built on it."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_scalar
from .exceptions import ValidationError
from .objective import ManeuverCandidate, objective_q

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 40
    iterations: int = 150
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    velocity_clamp: float = 0.5
    seed: int = 0
    early_stop: bool = False
    stall_iterations: int = 25
    stall_tolerance: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        check_scalar(self.swarm_size, "swarm_size", min_val=4, integer=True)
        check_scalar(self.iterations, "iterations", min_val=1, integer=True)
        check_scalar(self.inertia, "inertia", min_val=0, max_val=1.2)
        check_scalar(self.cognitive, "cognitive", min_val=0)
        check_scalar(self.social, "social", min_val=0)
        check_scalar(self.velocity_clamp, "velocity_clamp", min_val=0, max_val=1, include_min=False)
        check_scalar(self.seed, "seed", min_val=0, max_val=2**64 - 1, integer=True)
        check_scalar(self.stall_iterations, "stall_iterations", min_val=1, integer=True)
        check_scalar(self.stall_tolerance, "stall_tolerance", min_val=0)
        check_scalar(self.workers, "workers", min_val=1, integer=True)


@dataclass
class OptimizationResult:
    best_x: np.ndarray
    best_q: float
    history: list
    evaluations: int
    stopped_early: bool = False
    best_candidate: ManeuverCandidate | None = None
    best_report: object = None
    rollout: object = None
    series: object = None


def _check_bounds(bounds):
    lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0:
        raise ValidationError("bounds must be two 1D arrays of equal length")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValidationError("bounds must be finite")
    if np.any(lo >= hi):
        raise ValidationError("every lower bound must be below its upper bound")
    return lo, hi


def pso_minimize(evaluate, bounds, cfg=PsoConfig()):
    """Minimize ``evaluate`` over a box with a global-best inertia-weight PSO.

    Each particle draws from its own PCG64 stream spawned from ``cfg.seed``,
    so a run is reproducible and the first ``k`` iterations of a longer run
    equal a ``k``-iteration run.  Non-finite objective values count as
    ``+inf``.  Evaluations may run on ``cfg.workers`` threads; results are
    merged in particle order.
    """
    lo, hi = _check_bounds(bounds)
    dim = lo.size
    width = hi - lo
    vmax = cfg.velocity_clamp * width
    streams = [np.random.Generator(np.random.PCG64(s))
               for s in np.random.SeedSequence(cfg.seed).spawn(cfg.swarm_size)]

    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None

    def score(positions):
        if pool is None:
            values = [evaluate(p) for p in positions]
        else:
            values = list(pool.map(evaluate, positions))
        out = np.array([float(v) for v in values])
        out[~np.isfinite(out)] = np.inf
        return out

    try:
        x = np.array([lo + g.random(dim) * width for g in streams])
        vel = np.zeros_like(x)
        f = score(x)
        evaluations = cfg.swarm_size
        pbest, pbest_f = x.copy(), f.copy()
        g = int(np.argmin(pbest_f))
        gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        history = []
        stall = 0
        stopped = False
        for it in range(cfg.iterations):
            r = [(s.random(dim), s.random(dim)) for s in streams]
            r1 = np.array([a for a, _ in r])
            r2 = np.array([b for _, b in r])
            vel = (cfg.inertia * vel + cfg.cognitive * r1 * (pbest - x)
                   + cfg.social * r2 * (gbest - x))
            vel = np.clip(vel, -vmax, vmax)
            x = np.clip(x + vel, lo, hi)
            f = score(x)
            evaluations += cfg.swarm_size
            better = f < pbest_f
            pbest[better], pbest_f[better] = x[better], f[better]
            previous = gbest_f
            g = int(np.argmin(pbest_f))
            if pbest_f[g] < gbest_f:
                gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
            history.append(gbest_f)
            if cfg.early_stop:
                improved = previous - gbest_f > cfg.stall_tolerance * max(abs(previous), 1e-300)
                stall = 0 if improved or not math.isfinite(previous) else stall + 1
                if stall >= cfg.stall_iterations:
                    stopped = True
                    logger.debug("PSO stalled after %d iterations", it + 1)
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    return OptimizationResult(gbest, gbest_f, history, evaluations, stopped)


def optimize_maneuver(problem, cfg=PsoConfig()):
    """Search acceleration knots in ``[a_min, a_max]`` minimizing Q for ``problem``."""

    def evaluate(x):
        return objective_q(problem.candidate(x), problem)[0]

    result = pso_minimize(evaluate, problem.bounds, cfg)
    cand = problem.candidate(result.best_x)
    rollout = problem.rollout(cand)
    series = problem.series(rollout.trajectory)
    result.best_candidate = cand
    result.best_report = problem.score(rollout.trajectory)
    result.rollout = rollout
    result.series = series
    return result


class ManeuverOptimizer(BaseEstimator):
    """Estimator-style wrapper: ``fit`` a :class:`~safezone.objective.ManeuverProblem`,
    then ``predict`` the optimized ego trajectory.

    Parameters mirror :class:`PsoConfig`.
    """

    def __init__(self, swarm_size=40, iterations=150, inertia=0.729, cognitive=1.49445,
                 social=1.49445, velocity_clamp=0.5, seed=0, early_stop=False,
                 stall_iterations=25, stall_tolerance=1e-6, workers=1):
        self.swarm_size = swarm_size
        self.iterations = iterations
        self.inertia = inertia
        self.cognitive = cognitive
        self.social = social
        self.velocity_clamp = velocity_clamp
        self.seed = seed
        self.early_stop = early_stop
        self.stall_iterations = stall_iterations
        self.stall_tolerance = stall_tolerance
        self.workers = workers

    def _config(self):
        return PsoConfig(**self.get_params())

    def fit(self, problem, y=None):
        self.problem_ = problem
        self.result_ = optimize_maneuver(problem, self._config())
        self.best_candidate_ = self.result_.best_candidate
        self.best_q_ = self.result_.best_q
        self.report_ = self.result_.best_report
        self.rollout_ = self.result_.rollout
        return self

    def predict(self, problem=None):
        """Optimized trajectory; with a different ``problem`` the fitted profile is replayed on it."""
        check_is_fitted(self, "result_")
        if problem is None:
            return self.rollout_.trajectory
        return problem.rollout(self.best_candidate_).trajectory

    def score(self, problem, y=None):
        """Negative Q of the fitted profile on ``problem`` (higher is better)."""
        check_is_fitted(self, "result_")
        return -objective_q(self.best_candidate_, problem)[0]
