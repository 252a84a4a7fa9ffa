"""Elliptical safety-zone metrics, jerk comfort and PSO maneuver optimization."""
from .exceptions import (AlignmentError, SafezoneError, TrajectoryFormatError,
                         UnreachedGoalError, ValidationError)
from .geometry import (OverlapPolygon, Relation, SafetyEllipse, SafetyParams, VehicleFootprint,
                       adaptive_ellipse, brute_force_distance, classify, min_gap,
                       normalized_delta, overlap_area, overlap_polygon, radial_projection,
                       sample_boundary, shoelace_area)
from .metrics import (ComfortThresholds, InteractionSeries, ShapingParams, Trajectory,
                      comfort_constraints, intersection_metric, interaction_series,
                      lateral_jerk, longitudinal_jerk, safety_criterion, shaping_beta,
                      travel_time)
from .objective import (CriteriaReport, Limits, ManeuverCandidate, ManeuverProblem,
                        ObjectiveParams, ReferencePath, VehicleState, integrate_dynamics,
                        objective_q, penalty_psi)
from .optimizer import ManeuverOptimizer, OptimizationResult, PsoConfig, optimize_maneuver, pso_minimize

__version__ = "0.1.0"
