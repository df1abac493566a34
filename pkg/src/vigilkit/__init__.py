"""Vigilance scoring and resting-state band-power relevance toolkit.

Parses Go/NoGo session event logs, scores per-trial and cumulative
vigilance, extracts band-power ratio features from multichannel recordings,
and relates the two through cross-validated linear and neural models.
"""

from .errors import (CalibrationError, ParseError, PipelineError,
                     SingularFitError, StructureError, VigilkitError)
from .scoring import (PerformanceSummary, Thresholds, VigilanceSeries,
                      adaptive_thresholds, cvs_series, exclude_outliers,
                      performance_summary, score_session, tvs, tvs_series)
from .session import (LabeledTrial, Outcome, ParadigmSpec, Session, TrialEvent,
                      label_trials, load_session, parse_event_log, read_session,
                      serialize_session, write_event_log)

__all__ = [
    "CalibrationError", "ParseError", "PipelineError", "SingularFitError",
    "StructureError", "VigilkitError",
    "PerformanceSummary", "Thresholds", "VigilanceSeries",
    "adaptive_thresholds", "cvs_series", "exclude_outliers",
    "performance_summary", "score_session", "tvs", "tvs_series",
    "LabeledTrial", "Outcome", "ParadigmSpec", "Session", "TrialEvent",
    "label_trials", "load_session", "parse_event_log", "read_session",
    "serialize_session", "write_event_log",
]
