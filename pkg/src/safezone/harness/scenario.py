"""Scenario documents (YAML) and their conversion into optimization problems."""
from __future__ import annotations

import copy
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from ..exceptions import ValidationError
from ..geometry import SafetyParams, VehicleFootprint
from ..metrics import ComfortThresholds, ShapingParams, Trajectory
from ..objective import Limits, ManeuverProblem, ObjectiveParams, ReferencePath, VehicleState
from ..optimizer import PsoConfig
from .io import load_trajectory

SCHEMA_VERSION = 1
BUILTIN_PREFIX = "builtin:"


@dataclass(frozen=True)
class OpponentSource:
    """Either a recorded trajectory file or constant-speed travel along a path."""

    trajectory: Trajectory | None = None
    path: ReferencePath | None = None
    speed: float = 0.0
    start_s: float = 0.0

    def on_grid(self, t):
        if self.trajectory is not None:
            return self.trajectory
        s = self.start_s + self.speed * (np.asarray(t) - t[0])
        keep = s <= self.path.length
        if keep.sum() < 3:
            raise ValidationError("opponent path is too short for the simulation grid")
        x, y, h = self.path.point_at(s[keep])
        return Trajectory(np.asarray(t)[keep], x, y, np.full(keep.sum(), self.speed), h)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    ego_footprint: VehicleFootprint
    ego_path: ReferencePath
    ego_start: VehicleState
    limits: Limits
    opp_footprint: VehicleFootprint
    opponent: OpponentSource | None
    safety: SafetyParams
    objective: ObjectiveParams
    pso: PsoConfig
    dt: float
    horizon_s: float
    n_knots: int
    hold: str
    document: dict

    @property
    def time_grid(self):
        return np.arange(int(round(self.horizon_s / self.dt)) + 1) * self.dt

    def opponent_trajectory(self, t=None):
        if self.opponent is None:
            return None
        return self.opponent.on_grid(self.time_grid if t is None else t)

    def problem(self, with_opponent=True):
        opp = self.opponent_trajectory() if with_opponent else None
        return ManeuverProblem(
            start=self.ego_start, path=self.ego_path, limits=self.limits,
            ego_footprint=self.ego_footprint, params=self.objective,
            opponent=opp, opp_footprint=self.opp_footprint if opp is not None else None,
            dt=self.dt, horizon_s=self.horizon_s, n_knots=self.n_knots, hold=self.hold)

    def with_seed(self, seed):
        doc = copy.deepcopy(self.document)
        doc.setdefault("pso", {})["seed"] = int(seed)
        return from_dict(doc, base_dir=None, name=self.name)


def _section(doc, key, required=True):
    value = doc.get(key)
    if value is None:
        if required:
            raise ValidationError(f"scenario is missing the {key!r} section")
        return {}
    if not isinstance(value, dict):
        raise ValidationError(f"scenario section {key!r} must be a mapping")
    return value


def _build(cls, section, where):
    try:
        return cls(**section)
    except TypeError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _path(section, where):
    if "waypoints" not in section:
        raise ValidationError(f"{where}: path needs 'waypoints'")
    return ReferencePath(np.asarray(section["waypoints"], dtype=float))


def _opponent(section, base_dir):
    if not section:
        return None
    src = _section(section, "source")
    kind = src.get("kind", "path")
    if kind == "file":
        file = Path(src["file"])
        if not file.is_absolute() and base_dir is not None:
            file = base_dir / file
        if not file.exists():
            raise FileNotFoundError(f"opponent trajectory file not found: {file}")
        return OpponentSource(trajectory=load_trajectory(file, src.get("format")))
    if kind == "path":
        speed = float(src.get("speed", 0.0))
        if speed < 0:
            raise ValidationError("opponent speed must be non-negative")
        return OpponentSource(path=_path(src, "opponent.source"), speed=speed,
                              start_s=float(src.get("start_s", 0.0)))
    raise ValidationError(f"unknown opponent source kind {kind!r}")


def from_dict(doc, base_dir=None, name="scenario"):
    if not isinstance(doc, dict):
        raise ValidationError("scenario document must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    sim = _section(doc, "sim", required=False)
    ego = _section(doc, "ego")
    safety = _build(SafetyParams, _section(doc, "safety", required=False), "safety")
    obj = _section(doc, "objective", required=False)
    goal = _section(ego, "goal")
    pens = _section(obj, "penalties", required=False)
    pen_pairs = tuple((float(p.get("m", 1.0)), float(p.get("p", 5.0)))
                      for p in (pens.get("longitudinal", {}), pens.get("lateral", {})))
    objective = ObjectiveParams(
        goal=tuple(goal.get("point", ())), goal_radius_m=goal.get("radius_m", 1.0),
        w_time=obj.get("w_time", 1.0), w_safe=obj.get("w_safe", 1.0),
        shaping=_build(ShapingParams, obj.get("shaping", {}), "objective.shaping"),
        penalties=pen_pairs,
        thresholds=_build(ComfortThresholds, obj.get("thresholds", {}), "objective.thresholds"),
        safety=safety, int_scale=obj.get("int_scale", 1.0))
    opp = _section(doc, "opponent", required=False)
    start = _section(ego, "start")
    return ScenarioConfig(
        name=str(doc.get("name", name)),
        ego_footprint=_build(VehicleFootprint, _section(ego, "footprint"), "ego.footprint"),
        ego_path=_path(_section(ego, "path"), "ego.path"),
        ego_start=VehicleState(float(start.get("s", 0.0)), float(start.get("v", 0.0)),
                               float(start.get("a", 0.0))),
        limits=_build(Limits, _section(ego, "limits", required=False), "ego.limits"),
        opp_footprint=_build(VehicleFootprint, _section(opp, "footprint"), "opponent.footprint")
        if opp else None,
        opponent=_opponent(opp, base_dir),
        safety=safety, objective=objective,
        pso=_build(PsoConfig, _section(doc, "pso", required=False), "pso"),
        dt=float(sim.get("dt", 0.1)), horizon_s=float(sim.get("horizon_s", 15.0)),
        n_knots=int(sim.get("n_knots", 10)), hold=str(sim.get("hold", "zero")),
        document=copy.deepcopy(doc))


def load_scenario(path):
    """Load a scenario file, or a bundled one via ``builtin:<name>``."""
    path = str(path)
    if path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX):]
        res = resources.files("safezone.data").joinpath(f"{name}.yaml")
        if not res.is_file():
            raise ValidationError(f"no bundled scenario named {name!r}")
        return from_dict(yaml.safe_load(res.read_text()), base_dir=None, name=name)
    file = Path(path)
    try:
        text = file.read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"scenario file not found: {file}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"{file}: {exc}") from None
    return from_dict(doc, base_dir=file.parent, name=file.stem)


def default_scenario():
    return load_scenario(BUILTIN_PREFIX + "crossing")
