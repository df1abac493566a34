"""Independent reference implementations used to cross-check the package.

Everything here is written naively from the definitions (plain loops,
normal equations, direct DFT sums) and shares no code with the package
under test. Keep it slow and obvious.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------- scoring

def label_trial(digit: int, target: int, clicked: bool):
    """(outcome_name, is_error) from the Go/NoGo contingency table."""
    if digit == target:
        return ("CommissionError", True) if clicked else ("CorrectInhibition", False)
    return ("Hit", False) if clicked else ("OmissionError", True)


def trial_level(outcome: str, rt_ms, multi_click: bool,
                lower_ms: float, upper_ms: float) -> int:
    if outcome in ("CommissionError", "OmissionError"):
        return 0
    if multi_click:
        return 1
    if outcome == "CorrectInhibition":
        return 4
    if rt_ms > upper_ms:
        return 2
    if rt_ms < lower_ms:
        return 3
    return 4


def rolling_cvs(levels, window: int = 36) -> list[float]:
    """Recompute each point from scratch; integer sums keep this exact."""
    out = []
    for i in range(len(levels)):
        chunk = levels[max(0, i - window + 1): i + 1]
        out.append(sum(chunk) / len(chunk) / 4)
    return out


def mean(values) -> float:
    return math.fsum(values) / len(values)


def sample_sd(values) -> float:
    m = mean(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / (len(values) - 1))


def summary_measures(outcomes, hit_rts, cvs) -> dict[str, float]:
    n_target = outcomes.count("CommissionError") + outcomes.count("CorrectInhibition")
    n_nontarget = outcomes.count("Hit") + outcomes.count("OmissionError")
    return {
        "ce_pct": 100.0 * outcomes.count("CommissionError") / n_target,
        "oe_pct": 100.0 * outcomes.count("OmissionError") / n_nontarget,
        "hrt_mean_ms": mean(hit_rts),
        "hrt_var": sample_sd(hit_rts) / mean(hit_rts),
        "cvs_mean": mean(cvs),
        "cvs_var": sample_sd(cvs) / mean(cvs),
    }


def exact_rolling_cvs(levels, window: int = 36) -> list[Fraction]:
    """Rational-arithmetic CVS for hand-computable fixtures."""
    out = []
    for i in range(len(levels)):
        chunk = levels[max(0, i - window + 1): i + 1]
        out.append(Fraction(sum(chunk), 4 * len(chunk)))
    return out


# ------------------------------------------------------------- regression

def ols_coefficients(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Normal equations with an explicit intercept column."""
    design = np.column_stack([np.ones(len(y)), x])
    gram = design.T @ design
    return np.linalg.solve(gram, design.T @ y)


def ols_predict(x: np.ndarray, coef: np.ndarray) -> np.ndarray:
    return coef[0] + np.atleast_2d(x) @ coef[1:]


def loo_predictions(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Refit from scratch with each row held out."""
    n = len(y)
    preds = np.empty(n)
    for i in range(n):
        keep = [j for j in range(n) if j != i]
        coef = ols_coefficients(x[keep], y[keep])
        preds[i] = ols_predict(x[i:i + 1], coef)[0]
    return preds


def r_squared(y: np.ndarray, preds: np.ndarray) -> float:
    res = math.fsum((a - b) ** 2 for a, b in zip(y, preds))
    tot = math.fsum((a - mean(y)) ** 2 for a in y)
    return 1.0 - res / tot

def adjusted(r2: float, n: int, k: int) -> float:
    return 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1)


def pearson(a, b) -> float:
    ma, mb = mean(a), mean(b)
    num = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    da = math.sqrt(math.fsum((x - ma) ** 2 for x in a))
    db = math.sqrt(math.fsum((y - mb) ** 2 for y in b))
    return num / (da * db)


def bh_fdr(pvals: list[float]) -> list[float]:
    """Benjamini-Hochberg step-up, straight from the definition."""
    m = len(pvals)
    order = sorted(range(m), key=lambda i: pvals[i])
    adjusted_sorted = [pvals[order[rank]] * m / (rank + 1) for rank in range(m)]
    for rank in range(m - 2, -1, -1):
        adjusted_sorted[rank] = min(adjusted_sorted[rank], adjusted_sorted[rank + 1])
    out = [0.0] * m
    for rank, idx in enumerate(order):
        out[idx] = min(1.0, adjusted_sorted[rank])
    return out


def all_subsets(n_features: int):
    """Every non-empty feature subset, grouped by size."""
    by_size = {}
    for k in range(1, n_features + 1):
        by_size[k] = list(itertools.combinations(range(n_features), k))
    return by_size


# -------------------------------------------------------------- spectral

def dft_band_power(x: np.ndarray, fs_hz: float, lo_hz: float, hi_hz: float) -> float:
    """Direct O(N^2) DFT, summing |X_k|^2 over bins with lo <= f < hi."""
    n = len(x)
    total = 0.0
    for k in range(n // 2 + 1):
        freq = k * fs_hz / n
        if lo_hz <= freq < hi_hz:
            angles = -2.0 * math.pi * k * np.arange(n) / n
            re = math.fsum(x * np.cos(angles))
            im = math.fsum(x * np.sin(angles))
            total += re * re + im * im
    return total


# ------------------------------------------------------------------- nn

def adam_first_step(grad: np.ndarray, lr: float, eps: float = 1e-8) -> np.ndarray:
    """Closed form for t=1: bias correction cancels the decay factors."""
    return -lr * grad / (np.abs(grad) + eps)


def nn_loss(w1, b1, w2, b2, x, y, l2: float) -> float:
    """Forward pass and penalized MSE, computed with plain loops."""
    n, _ = x.shape
    total = 0.0
    for i in range(n):
        hidden = np.maximum(w1 @ x[i] + b1, 0.0)
        pred = float(w2 @ hidden + b2)
        total += (pred - y[i]) ** 2
    penalty = l2 * (float(np.sum(w1 * w1)) + float(np.sum(w2 * w2)))
    return total / n + penalty
