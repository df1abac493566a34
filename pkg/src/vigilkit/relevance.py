"""Cross-validated feature relevance analysis for performance prediction.

Univariate screening runs a leave-one-participant-out linear model per
feature and keeps those whose prediction correlation is significant at the
0.1 level. The multivariate search then evaluates every non-empty subset of
the screened features, reports the best models per subset size, and attaches
permutation p-values (target permuted, 500 draws by default).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import SingularFitError
from .scoring import PerformanceSummary

PERMUTATIONS_DEFAULT = 500
SCREEN_ALPHA_DEFAULT = 0.1
SUBSET_CAP_DEFAULT = 20


@dataclass(frozen=True)
class Dataset:
    """Participants-by-features matrix with one target measure."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    participant_ids: tuple[str, ...]

    def __post_init__(self):
        if self.X.ndim != 2:
            raise ValueError("X must be 2-D")
        n, f = self.X.shape
        if n < 4:
            raise ValueError(f"need >= 4 participants, got {n}")
        if self.y.shape != (n,):
            raise ValueError("y length must match X rows")
        if len(self.feature_names) != f:
            raise ValueError("feature_names length must match X columns")
        if len(self.participant_ids) != n:
            raise ValueError("participant_ids length must match X rows")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise ValueError("dataset contains NaN or Inf")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def constant_columns(self) -> np.ndarray:
        return np.where(self.X.std(axis=0) == 0.0)[0]

    def subset_rows(self, mask: np.ndarray) -> "Dataset":
        mask = np.asarray(mask, dtype=bool)
        return Dataset(
            X=self.X[mask], y=self.y[mask], feature_names=self.feature_names,
            participant_ids=tuple(p for p, m in zip(self.participant_ids, mask) if m),
        )


@dataclass(frozen=True)
class RegressionMetrics:
    """Cross-validated goodness of fit between true and predicted targets.

    `r2` is the prediction R-squared, 1 - SS_res/SS_tot, which can be
    negative out of sample; `pearson_r` is the prediction correlation.
    """

    r2: float
    adj_r2: float
    rmse: float
    pearson_r: float
    p_value: float


@dataclass(frozen=True)
class SubsetResult:
    features: tuple[int, ...]
    metrics: RegressionMetrics
    permutation_p: float | None = None


@dataclass(frozen=True)
class CardinalityBest:
    """Winners at one subset size; ties are all kept."""

    k: int
    n_subsets: int
    best_adj_r2: tuple[SubsetResult, ...]
    best_pearson_r: tuple[SubsetResult, ...]
    best_rmse: tuple[SubsetResult, ...]


@dataclass(frozen=True)
class MvpaReport:
    results: tuple[SubsetResult, ...]          # feasible subsets, adj_r2 descending
    by_cardinality: tuple[CardinalityBest, ...]
    n_evaluated: int
    n_infeasible: int

    def overall_best(self) -> SubsetResult | None:
        """Highest adjusted R-squared; ties resolved toward fewer features."""
        if not self.results:
            return None
        return min(self.results,
                   key=lambda r: (-r.metrics.adj_r2, len(r.features), r.features))


def adjusted_r2(r2: float, n: int, k: int) -> float:
    """Penalize R-squared for model size: 1 - (1-R2)(N-1)/(N-k-1)."""
    if n - k - 1 <= 0:
        raise ValueError(f"adjusted R2 undefined for N={n}, k={k}")
    return 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1)


def pearson_r_p(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Product-moment correlation with the two-tailed t-test p-value.

    Returns (nan, nan) when either side has zero variance.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    if n < 3:
        raise ValueError("need at least 3 observations")
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        return float("nan"), float("nan")
    r = float(np.clip((da @ db) / denom, -1.0, 1.0))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(stats.t.sf(abs(t), n - 2))
    return r, p


def pearson_threshold(n: int, alpha: float = 0.05) -> float:
    """Smallest |r| reaching two-tailed significance `alpha` at sample size n."""
    t_crit = float(stats.t.ppf(1.0 - alpha / 2.0, n - 2))
    return t_crit / math.sqrt(n - 2 + t_crit ** 2)


def fdr_correct(pvals, q: float = 0.05) -> np.ndarray:
    """Benjamini-Hochberg step-up rejection mask at level q."""
    pvals = np.asarray(pvals, dtype=float)
    if pvals.size == 0:
        return np.zeros(0, dtype=bool)
    m = pvals.size
    order = np.argsort(pvals, kind="stable")
    ranked = pvals[order]
    below = np.where(ranked <= (np.arange(1, m + 1) * q / m))[0]
    reject = np.zeros(m, dtype=bool)
    if below.size:
        reject[order[: below[-1] + 1]] = True
    return reject


@dataclass(frozen=True)
class BehavioralCorrelations:
    measures: tuple[str, ...]
    r: np.ndarray
    p: np.ndarray
    significant: np.ndarray    # FDR-corrected, off-diagonal
    defined: np.ndarray        # False for constant measures


def behavioral_correlations(summaries: list[PerformanceSummary],
                            q: float = 0.05) -> BehavioralCorrelations:
    """Pairwise Pearson matrix over the six measures with FDR-corrected tests."""
    if len(summaries) < 4:
        raise ValueError("need >= 4 participants")
    measures = PerformanceSummary.MEASURES
    table = np.array([[getattr(s, m) for m in measures] for s in summaries], dtype=float)
    k = len(measures)
    defined = np.array([np.std(table[:, j]) > 0 and np.all(np.isfinite(table[:, j]))
                        for j in range(k)])
    r = np.full((k, k), np.nan)
    p = np.full((k, k), np.nan)
    np.fill_diagonal(r, 1.0)
    np.fill_diagonal(p, 0.0)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for i, j in pairs:
        if defined[i] and defined[j]:
            r[i, j], p[i, j] = pearson_r_p(table[:, i], table[:, j])
            r[j, i], p[j, i] = r[i, j], p[i, j]
    pvec = np.array([p[i, j] for i, j in pairs])
    ok = np.isfinite(pvec)
    reject_vec = np.zeros(len(pairs), dtype=bool)
    reject_vec[ok] = fdr_correct(pvec[ok], q=q)
    significant = np.zeros((k, k), dtype=bool)
    for (i, j), rej in zip(pairs, reject_vec):
        significant[i, j] = significant[j, i] = rej
    return BehavioralCorrelations(measures=measures, r=r, p=p,
                                  significant=significant, defined=defined)


def standardize(X: np.ndarray, policy: str = "global",
                train_idx=None) -> tuple[np.ndarray, np.ndarray]:
    """Z-score columns; returns (X', kept column indices).

    `global` uses all rows for the statistics; `per-fold` uses only
    `train_idx` rows and applies those statistics to every row, so held-out
    samples never leak into the scaling. Zero-variance columns are dropped
    with a warning. Sample (n-1) SD throughout.
    """
    X = np.asarray(X, dtype=float)
    if policy not in ("global", "per-fold"):
        raise ValueError(f"unknown standardization policy {policy!r}")
    if policy == "per-fold":
        if train_idx is None:
            raise ValueError("per-fold standardization needs train_idx")
        stats_rows = X[np.asarray(train_idx)]
    else:
        stats_rows = X
    mean = stats_rows.mean(axis=0)
    sd = stats_rows.std(axis=0, ddof=1)
    keep = np.where(sd > 0.0)[0]
    if keep.size < X.shape[1]:
        warnings.warn(f"dropped {X.shape[1] - keep.size} zero-variance column(s)",
                      stacklevel=2)
    return (X[:, keep] - mean[keep]) / sd[keep], keep


def _collinear_columns(design: np.ndarray) -> list[int]:
    # pivoted QR: columns whose R diagonal collapses are the dependent ones
    from scipy.linalg import qr
    _, r_mat, piv = qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r_mat))
    tol = diag.max() * max(design.shape) * np.finfo(float).eps if diag.max() > 0 else 0.0
    bad = [int(piv[i]) for i in range(len(diag)) if diag[i] <= tol]
    return sorted(c - 1 for c in bad if c > 0)   # drop the intercept column


def ols_fit(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares coefficients and intercept; raises on rank deficiency."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 1 and X.shape[1] > 1 and len(y) == X.shape[1]:
        X = X.T
    n, k = X.shape
    if n < k + 2:
        raise ValueError(f"need N >= k + 2 (N={n}, k={k})")
    design = np.column_stack([np.ones(n), X])
    beta, _, rank, _ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
    if rank < k + 1:
        raise SingularFitError(_collinear_columns(design))
    return beta[1:], float(beta[0])


def _fold_prediction_row(X: np.ndarray, y_len: int, n: int) -> np.ndarray:
    """Row a_n with a_n @ y = LOO prediction for participant n, any target y."""
    train = np.delete(np.arange(y_len), n)
    design = np.column_stack([np.ones(y_len - 1), X[train]])
    pinv = np.linalg.pinv(design)
    rank = np.linalg.matrix_rank(design)
    if rank < design.shape[1]:
        raise SingularFitError(_collinear_columns(design))
    test_row = np.concatenate([[1.0], X[n]])
    weights = test_row @ pinv                 # weights over training targets
    row = np.zeros(y_len)
    row[train] = weights
    return row


def loo_prediction_matrix(X: np.ndarray) -> np.ndarray:
    """Matrix A with (A @ y)[n] = the fold-n prediction; linear in the target."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    return np.vstack([_fold_prediction_row(X, n, i) for i in range(n)])


def loocv_regress(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, RegressionMetrics]:
    """Leave-one-out predictions and their goodness of fit against the truth.

    Each fold fits ordinary least squares (with intercept) on the remaining
    participants. Standardizing columns per fold leaves these predictions
    unchanged (OLS is affine-invariant), so no scaling policy is applied here.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n < k + 3:      # each fold trains on n-1 samples and needs k+2 of them
        raise ValueError(f"too few participants for LOO with k={k} (N={n})")
    preds = np.empty(n)
    for i in range(n):
        train = np.delete(np.arange(n), i)
        coef, intercept = ols_fit(X[train], y[train])
        preds[i] = X[i] @ coef + intercept
    ss_res = float(np.sum((y - preds) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    r, p = pearson_r_p(y, preds)
    metrics = RegressionMetrics(
        r2=r2,
        adj_r2=adjusted_r2(r2, n, k) if not math.isnan(r2) else float("nan"),
        rmse=math.sqrt(ss_res / n),
        pearson_r=r,
        p_value=p,
    )
    return preds, metrics


def univariate_screen_table(dataset: Dataset) -> list[RegressionMetrics | None]:
    """Single-feature LOO-CV metrics for every column (None when infeasible)."""
    out: list[RegressionMetrics | None] = []
    for j in range(dataset.n_features):
        try:
            _, metrics = loocv_regress(dataset.X[:, j], dataset.y)
            out.append(metrics)
        except (SingularFitError, ValueError):
            out.append(None)
    return out


def screening_pvalues(dataset: Dataset, n_permutations: int = PERMUTATIONS_DEFAULT,
                      seed: int = 0) -> np.ndarray:
    """Permutation p of each feature's single-column LOO prediction correlation.

    A t-test on that correlation is badly miscalibrated (under the null, LOO
    predictions anti-correlate with the truth by construction), so screening
    significance comes from the same permutation machinery as the subset
    models. Infeasible columns get NaN. Each feature uses its own
    deterministic substream of `seed`.
    """
    out = np.full(dataset.n_features, np.nan)
    for j in range(dataset.n_features):
        try:
            out[j] = permutation_pvalue(
                dataset.X[:, j], dataset.y, n_permutations=n_permutations,
                seed=np.random.SeedSequence([seed, j]))
        except (SingularFitError, ValueError):
            pass
    return out


def select_from_pvalues(pvals: np.ndarray, alpha: float,
                        max_keep: int | None = None) -> list[int]:
    """Indices with p < alpha; with `max_keep`, only the smallest-p ones."""
    selected = [(float(p), j) for j, p in enumerate(pvals)
                if not math.isnan(p) and p < alpha]
    if max_keep is not None and len(selected) > max_keep:
        selected = sorted(selected)[:max_keep]
    return sorted(j for _, j in selected)


def screen_features(dataset: Dataset, alpha: float = SCREEN_ALPHA_DEFAULT,
                    max_keep: int | None = None,
                    n_permutations: int = PERMUTATIONS_DEFAULT,
                    seed: int = 0) -> list[int]:
    """Features whose prediction correlation is significant at `alpha`."""
    return select_from_pvalues(screening_pvalues(dataset, n_permutations, seed),
                               alpha, max_keep)


def enumerate_subsets(n: int, cap: int = SUBSET_CAP_DEFAULT):
    """Yield all 2^n - 1 non-empty index subsets, grouped by cardinality."""
    if n < 1:
        raise ValueError("need at least one feature to enumerate subsets")
    if n > cap:
        raise ValueError(
            f"{n} features would produce 2^{n}-1 subsets; raise cap={cap} explicitly "
            "if this is intended")
    for k in range(1, n + 1):
        yield from itertools.combinations(range(n), k)


def _permuted_correlations(a_matrix: np.ndarray, y: np.ndarray,
                           n_permutations: int,
                           rng: np.random.Generator) -> np.ndarray:
    """corr(perm(y), LOO predictions of perm(y)) for uniform permutations."""
    n = y.size
    perms = rng.permuted(np.tile(np.arange(n), (n_permutations, 1)), axis=1)
    yp = y[perms]                              # (P, N)
    preds = yp @ a_matrix.T
    yc = yp - yp.mean(axis=1, keepdims=True)
    pc = preds - preds.mean(axis=1, keepdims=True)
    denom = np.sqrt((yc * yc).sum(axis=1) * (pc * pc).sum(axis=1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(denom > 0.0, (yc * pc).sum(axis=1) / denom, np.nan)


def permutation_pvalue(X: np.ndarray, y: np.ndarray, n_permutations: int = PERMUTATIONS_DEFAULT,
                       seed=0) -> float:
    """Probability of a permuted target reaching the observed LOO correlation.

    One-sided (greater), with the +1 correction, so values are bounded below
    by 1/(P+1).
    """
    if n_permutations < 1:
        raise ValueError("need at least one permutation")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    a_matrix = loo_prediction_matrix(X)       # raises if any fold is singular
    observed = _safe_corr(y, a_matrix @ y)
    if math.isnan(observed):
        return 1.0
    rng = np.random.default_rng(seed)
    perm_r = _permuted_correlations(a_matrix, y, n_permutations, rng)
    count = int(np.sum(perm_r[np.isfinite(perm_r)] >= observed))
    return (1 + count) / (n_permutations + 1)


def _safe_corr(a: np.ndarray, b: np.ndarray) -> float:
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        return float("nan")
    return float((da @ db) / denom)


def _winners(rows: list[SubsetResult], key, best) -> tuple[SubsetResult, ...]:
    values = [key(r) for r in rows]
    finite = [v for v in values if not math.isnan(v)]
    if not finite:
        return ()
    target = best(finite)
    return tuple(r for r, v in zip(rows, values) if v == target)


def mvpa_search(dataset: Dataset, screened: list[int],
                n_permutations: int = PERMUTATIONS_DEFAULT, seed: int = 0,
                cap: int = SUBSET_CAP_DEFAULT) -> MvpaReport:
    """Exhaustive multivariate search over subsets of the screened features.

    Every non-empty subset gets LOO-CV metrics. Per subset size, the report
    keeps all subsets tied for the best adjusted R-squared, best prediction
    correlation, and lowest RMSE; permutation p-values are computed for those
    reported subsets only.
    """
    if not screened:
        raise ValueError("screened feature set is empty")
    screened = sorted(screened)
    results_by_k: dict[int, list[SubsetResult]] = {}
    n_infeasible = 0
    n_evaluated = 0
    for local_subset in enumerate_subsets(len(screened), cap=cap):
        features = tuple(screened[i] for i in local_subset)
        n_evaluated += 1
        try:
            _, metrics = loocv_regress(dataset.X[:, features], dataset.y)
        except (SingularFitError, ValueError):
            n_infeasible += 1
            continue
        results_by_k.setdefault(len(features), []).append(
            SubsetResult(features=features, metrics=metrics))

    by_cardinality = []
    need_pvalue: dict[tuple[int, ...], SubsetResult] = {}
    for k in sorted(results_by_k):
        rows = results_by_k[k]
        best_adj = _winners(rows, lambda r: r.metrics.adj_r2, max)
        best_r = _winners(rows, lambda r: r.metrics.pearson_r, max)
        best_rmse = _winners(rows, lambda r: r.metrics.rmse, min)
        for res in (*best_adj, *best_r, *best_rmse):
            need_pvalue[res.features] = res
        by_cardinality.append((k, len(rows), best_adj, best_r, best_rmse))

    pvalues = {
        feats: permutation_pvalue(dataset.X[:, feats], dataset.y,
                                  n_permutations=n_permutations, seed=seed)
        for feats in sorted(need_pvalue)
    }

    def attach(res: SubsetResult) -> SubsetResult:
        return SubsetResult(res.features, res.metrics, pvalues.get(res.features))

    all_results = [attach(r) for rows in results_by_k.values() for r in rows]
    all_results.sort(key=lambda r: (-r.metrics.adj_r2 if not math.isnan(r.metrics.adj_r2)
                                    else math.inf, len(r.features), r.features))
    cards = tuple(
        CardinalityBest(
            k=k, n_subsets=n_sub,
            best_adj_r2=tuple(attach(r) for r in badj),
            best_pearson_r=tuple(attach(r) for r in br),
            best_rmse=tuple(attach(r) for r in brm),
        )
        for k, n_sub, badj, br, brm in by_cardinality
    )
    if not all_results:
        warnings.warn("every subset was infeasible; returning an empty report", stacklevel=2)
    return MvpaReport(results=tuple(all_results), by_cardinality=cards,
                      n_evaluated=n_evaluated, n_infeasible=n_infeasible)


def significance_stars(p: float) -> str:
    if math.isnan(p):
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""
