"""Time-series classification with per-class principal curves."""
from .classifier import LearningConfig, online_update, predict_label
from .clpc import FitConfig, fit_clpc, fit_pattern, prune_low_angle
from .errors import PcstreamError
from .matching import MatchConfig, Window, match_offset, similarity_score
from .metrics import ConfusionCounts, MetricsReport, f_score, g_score
from .model import GoverningPattern, PrincipalCurve, TimedSample, project_nearest, project_onto_curve
from .sampling import QueryConfig, Strategy, exponential_query, linear_query

__version__ = "0.1.0"

__all__ = [
    "ConfusionCounts",
    "FitConfig",
    "GoverningPattern",
    "LearningConfig",
    "MatchConfig",
    "MetricsReport",
    "PcstreamError",
    "PrincipalCurve",
    "QueryConfig",
    "Strategy",
    "TimedSample",
    "Window",
    "exponential_query",
    "f_score",
    "fit_clpc",
    "fit_pattern",
    "g_score",
    "linear_query",
    "match_offset",
    "online_update",
    "predict_label",
    "project_nearest",
    "project_onto_curve",
    "prune_low_angle",
    "similarity_score",
]
