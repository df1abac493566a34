"""Adaptive trial vigilance scoring and summary performance measures.

Each trial receives a 5-level score (TVS) from its outcome, response speed,
and double-click events; the cumulative score (CVS) is the rolling mean of
TVS over a 36-trial window, normalized to [0, 1]. Session-level measures are
CE%, OE%, HRTmean, HRTvar, CVSmean, and CVSvar, where the two variabilities
are ratios of the sample standard deviation to the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CalibrationError
from .session import LabeledTrial, Outcome, ParadigmSpec

RT_LOWER_DEFAULT_MS = 250.0
CALIBRATION_TRIALS_DEFAULT = 27
CVS_WINDOW_DEFAULT = 36
MAX_TVS_LEVEL = 4


@dataclass(frozen=True)
class Thresholds:
    """Fast/slow response-time boundaries; the upper bound is per-participant."""

    rt_lower_ms: float
    rt_upper_ms: float

    def __post_init__(self):
        if not math.isfinite(self.rt_upper_ms) or self.rt_upper_ms <= 0:
            raise ValueError("rt_upper_ms must be finite and positive")
        if self.rt_lower_ms >= self.rt_upper_ms:
            raise ValueError(f"rt_lower ({self.rt_lower_ms}) must be < rt_upper ({self.rt_upper_ms})")


@dataclass(frozen=True)
class VigilanceSeries:
    """Per-trial TVS levels and the rolling, normalized CVS curve."""

    tvs: np.ndarray          # int levels in 0..4
    cvs: np.ndarray          # floats in [0, 1]
    window_trials: int

    def __post_init__(self):
        if len(self.tvs) != len(self.cvs):
            raise ValueError("tvs and cvs must have equal length")

    @property
    def warmup(self) -> np.ndarray:
        """True for trials whose window is still expanding (fewer than window_trials)."""
        n = len(self.tvs)
        return np.arange(1, n + 1) < self.window_trials


@dataclass(frozen=True)
class PerformanceSummary:
    """The six session measures. Undefined entries are NaN with the flag cleared."""

    ce_pct: float
    oe_pct: float
    hrt_mean_ms: float
    hrt_var: float
    cvs_mean: float
    cvs_var: float
    hrt_defined: bool = True
    cvs_var_defined: bool = True

    MEASURES = ("ce_pct", "oe_pct", "cvs_mean", "cvs_var", "hrt_mean_ms", "hrt_var")


def _first_click_rts(trials: Sequence[LabeledTrial]) -> list[float]:
    return [t.rt_ms for t in trials if t.rt_ms is not None]


def _mean(values: Sequence[float] | np.ndarray) -> float:
    # fsum keeps the result independent of summation order
    return math.fsum(values) / len(values)


def _sample_sd(values: Sequence[float] | np.ndarray, mean: float) -> float:
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1))


def adaptive_thresholds(
    trials: Sequence[LabeledTrial],
    calib_trials: int = CALIBRATION_TRIALS_DEFAULT,
    rt_lower_ms: float = RT_LOWER_DEFAULT_MS,
) -> Thresholds:
    """Calibrate the upper RT bound as mean + 2 sample-SD of early response times.

    Uses the first click of every clicked trial among the first `calib_trials`
    trials, error trials included.
    """
    rts = _first_click_rts(trials[:calib_trials])
    if len(rts) < 2:
        raise CalibrationError(
            f"need >= 2 response times in the first {calib_trials} trials, got {len(rts)}")
    mean = _mean(rts)
    sd = _sample_sd(rts, mean)
    upper = mean + 2.0 * sd
    if upper <= rt_lower_ms:
        raise CalibrationError(
            f"calibrated upper bound {upper:.1f} ms does not exceed the lower bound {rt_lower_ms} ms")
    return Thresholds(rt_lower_ms=rt_lower_ms, rt_upper_ms=upper)


def tvs(trial: LabeledTrial, th: Thresholds) -> int:
    """Score one trial on the 5-level vigilance scale.

    First matching rule wins: errors score 0; any double click scores 1;
    correct-but-slow scores 2; correct-but-impulsive scores 3; in-band hits
    and correct inhibitions score 4.
    """
    if trial.outcome in (Outcome.COMMISSION_ERROR, Outcome.OMISSION_ERROR):
        return 0
    if trial.multi_click:
        return 1
    if trial.outcome is Outcome.CORRECT_INHIBITION:
        return 4
    rt = trial.rt_ms
    if rt > th.rt_upper_ms:
        return 2
    if rt < th.rt_lower_ms:
        return 3
    return 4


def tvs_series(trials: Iterable[LabeledTrial], th: Thresholds) -> np.ndarray:
    return np.array([tvs(t, th) for t in trials], dtype=np.int64)


def cvs_series(levels: Sequence[int] | np.ndarray, window: int = CVS_WINDOW_DEFAULT) -> np.ndarray:
    """Rolling mean of TVS over the trailing `window` trials, normalized by 4.

    The window includes the current trial and expands from 1 during warm-up.
    Sums are integer, so the result is exact.
    """
    levels = np.asarray(levels, dtype=np.int64)
    if levels.size == 0:
        raise ValueError("empty TVS series")
    if window < 1:
        raise ValueError("window must be >= 1")
    csum = np.cumsum(levels)
    n = levels.size
    idx = np.arange(n)
    counts = np.minimum(idx + 1, window)
    window_sums = csum.copy()
    if n > window:
        window_sums[window:] = csum[window:] - csum[:-window]
    return window_sums / counts / MAX_TVS_LEVEL


def ratio_sd_mean(values: np.ndarray) -> float:
    """Sample SD divided by mean; NaN when no spread can be formed or mean is 0."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("nan")
    mean = _mean(values)
    if mean == 0.0:
        return float("nan")
    return _sample_sd(values, mean) / mean


def performance_summary(
    labeled: Sequence[LabeledTrial],
    vs: VigilanceSeries,
    paradigm: ParadigmSpec | None = None,
) -> PerformanceSummary:
    """Aggregate the six performance measures for a scored session.

    When `paradigm` is given, the trial count must be a whole number of blocks.
    """
    if len(labeled) != len(vs.tvs):
        raise ValueError("labeled trials and vigilance series length mismatch")
    if paradigm is not None and len(labeled) % paradigm.trials_per_block != 0:
        raise ValueError(
            f"{len(labeled)} trials is not a whole number of "
            f"{paradigm.trials_per_block}-trial blocks")

    outcomes = [t.outcome for t in labeled]
    n_ce = outcomes.count(Outcome.COMMISSION_ERROR)
    n_ci = outcomes.count(Outcome.CORRECT_INHIBITION)
    n_oe = outcomes.count(Outcome.OMISSION_ERROR)
    n_hit = outcomes.count(Outcome.HIT)
    n_target = n_ce + n_ci
    n_nontarget = n_oe + n_hit
    if n_target == 0 or n_nontarget == 0:
        raise ValueError("session must contain both target and non-target trials")

    hit_rts = np.array([t.rt_ms for t in labeled if t.outcome is Outcome.HIT], dtype=float)
    hrt_defined = hit_rts.size >= 1
    hrt_mean = _mean(hit_rts) if hrt_defined else float("nan")
    hrt_var = ratio_sd_mean(hit_rts) if hit_rts.size >= 2 else float("nan")

    cvs_mean = _mean(vs.cvs)
    cvs_var = ratio_sd_mean(vs.cvs)

    return PerformanceSummary(
        ce_pct=100.0 * n_ce / n_target,
        oe_pct=100.0 * n_oe / n_nontarget,
        hrt_mean_ms=hrt_mean,
        hrt_var=hrt_var,
        cvs_mean=cvs_mean,
        cvs_var=cvs_var,
        hrt_defined=hrt_defined and hit_rts.size >= 2,
        cvs_var_defined=not math.isnan(cvs_var),
    )


def score_session(
    labeled: Sequence[LabeledTrial],
    window: int = CVS_WINDOW_DEFAULT,
    calib_trials: int = CALIBRATION_TRIALS_DEFAULT,
    rt_lower_ms: float = RT_LOWER_DEFAULT_MS,
    paradigm: ParadigmSpec | None = None,
) -> tuple[Thresholds, VigilanceSeries, PerformanceSummary]:
    """Calibrate, score every trial, and summarize one labeled session."""
    th = adaptive_thresholds(labeled, calib_trials=calib_trials, rt_lower_ms=rt_lower_ms)
    levels = tvs_series(labeled, th)
    vs = VigilanceSeries(tvs=levels, cvs=cvs_series(levels, window), window_trials=window)
    summary = performance_summary(labeled, vs, paradigm=paradigm)
    return th, vs, summary


def exclude_outliers(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Inclusion mask keeping participants within mean + 2 sample-SD of a measure."""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        raise ValueError("outlier exclusion needs >= 3 participants")
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    return values <= mean + 2.0 * sd
