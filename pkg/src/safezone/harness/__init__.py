from .io import load_trajectory, save_trajectory
from .pipeline import baseline_report, compare, evaluate, run_optimize
from .report import CSV_HEADERS, EvaluationReport, emit_report, load_report
from .scenario import OpponentSource, ScenarioConfig, default_scenario, load_scenario

__all__ = ["CSV_HEADERS", "EvaluationReport", "OpponentSource", "ScenarioConfig",
           "baseline_report", "compare", "default_scenario", "emit_report", "evaluate",
           "load_report", "load_scenario", "load_trajectory", "run_optimize",
           "save_trajectory"]
