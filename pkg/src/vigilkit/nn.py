"""Single-hidden-layer regression network trained with Adam.

The network maps a standardized feature vector through one fully connected
ReLU layer to a linear output. Hyperparameters (learning rate and l2
coefficient) are chosen on a 15x15 log grid by repeated leave-one-out
cross-validation, and feature relevance is read off the first-layer input
weights summed over hidden units and averaged over all runs and folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PipelineError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
HIDDEN_UNITS_DEFAULT = (40, 90, 110, 130)


def _log_grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.geomspace(lo, hi, n))


@dataclass(frozen=True)
class NnConfig:
    """Training protocol for one hidden-unit count."""

    input_dim: int = 168
    hidden_units: int = 40
    max_epochs: int = 1000
    minibatch: int = 8
    patience_epochs: int = 1
    lr_grid: tuple[float, ...] = field(default_factory=lambda: _log_grid(1e-5, 1e-1, 15))
    l2_grid: tuple[float, ...] = field(default_factory=lambda: _log_grid(0.01, 10.0, 15))
    runs: int = 10
    seed: int = 0
    standardize_policy: str = "per-fold"

    def __post_init__(self):
        if self.standardize_policy not in ("per-fold", "global", "none"):
            raise ValueError(f"unknown policy {self.standardize_policy!r}")
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")
        if self.minibatch < 1:
            raise ValueError("minibatch must be >= 1")
        if self.max_epochs < 1 or self.patience_epochs < 1:
            raise ValueError("max_epochs and patience_epochs must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        for grid, name in ((self.lr_grid, "lr_grid"), (self.l2_grid, "l2_grid")):
            if len(grid) < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            if any(v <= 0 for v in grid):
                raise ValueError(f"{name} values must be positive")


@dataclass(frozen=True)
class NnParams:
    """Network parameters: W1 (U, F) input weights, b1 (U,), w2 (U,), b2 scalar."""

    W1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float

    def __post_init__(self):
        u, f = self.W1.shape
        if self.b1.shape != (u,) or self.w2.shape != (u,):
            raise ValueError("b1 and w2 must have one entry per hidden unit")
        if not (np.all(np.isfinite(self.W1)) and np.all(np.isfinite(self.b1))
                and np.all(np.isfinite(self.w2)) and math.isfinite(self.b2)):
            raise ValueError("parameters must be finite")


def init_params(input_dim: int, hidden_units: int, rng: np.random.Generator) -> NnParams:
    """Symmetric random weights scaled by 1/sqrt(fan-in); zero biases."""
    w1 = rng.standard_normal((hidden_units, input_dim)) / math.sqrt(input_dim)
    w2 = rng.standard_normal(hidden_units) / math.sqrt(hidden_units)
    return NnParams(W1=w1, b1=np.zeros(hidden_units), w2=w2, b2=0.0)


def forward(params: NnParams, x: np.ndarray) -> np.ndarray | float:
    """Prediction w2 . relu(W1 x + b1) + b2 for one sample or a batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    hidden = np.maximum(batch @ params.W1.T + params.b1, 0.0)
    preds = hidden @ params.w2 + params.b2
    return float(preds[0]) if single else preds


def loss_and_grads(params: NnParams, X: np.ndarray, y: np.ndarray,
                   l2: float) -> tuple[float, dict[str, np.ndarray | float]]:
    """Mean squared error plus l2 on weights (not biases), with exact gradients."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = y.size
    if n == 0:
        raise ValueError("batch must be nonempty")
    pre = X @ params.W1.T + params.b1
    hidden = np.maximum(pre, 0.0)
    preds = hidden @ params.w2 + params.b2
    resid = preds - y
    loss = float(resid @ resid) / n + l2 * (float(np.sum(params.W1 ** 2))
                                            + float(params.w2 @ params.w2))
    d_preds = 2.0 * resid / n
    d_hidden = np.outer(d_preds, params.w2) * (pre > 0.0)
    grads = {
        "W1": d_hidden.T @ X + 2.0 * l2 * params.W1,
        "b1": d_hidden.sum(axis=0),
        "w2": hidden.T @ d_preds + 2.0 * l2 * params.w2,
        "b2": float(d_preds.sum()),
    }
    return loss, grads


@dataclass(frozen=True)
class AdamState:
    m: dict
    v: dict
    t: int

    @classmethod
    def zeros(cls, params: NnParams) -> "AdamState":
        zero = {"W1": np.zeros_like(params.W1), "b1": np.zeros_like(params.b1),
                "w2": np.zeros_like(params.w2), "b2": 0.0}
        return cls(m=zero, v={k: np.copy(v) if isinstance(v, np.ndarray) else v
                              for k, v in zero.items()}, t=0)


def adam_step(params: NnParams, grads: dict, state: AdamState,
              lr: float) -> tuple[NnParams, AdamState]:
    """One Adam update with bias-corrected first and second moments."""
    t = state.t + 1
    new_m, new_v, updated = {}, {}, {}
    for name in ("W1", "b1", "w2", "b2"):
        g = grads[name]
        m = ADAM_BETA1 * state.m[name] + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * state.v[name] + (1.0 - ADAM_BETA2) * (g * g)
        m_hat = m / (1.0 - ADAM_BETA1 ** t)
        v_hat = v / (1.0 - ADAM_BETA2 ** t)
        step = lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        new_m[name], new_v[name] = m, v
        updated[name] = getattr(params, name) - step
    return (NnParams(W1=updated["W1"], b1=updated["b1"], w2=updated["w2"],
                     b2=float(updated["b2"])),
            AdamState(m=new_m, v=new_v, t=t))


@dataclass(frozen=True)
class FoldResult:
    params: NnParams | None
    val_mse: float
    val_rmse: float
    epochs_run: int
    diverged: bool
    diverged_epoch: int | None = None


def _val_mse(params: NnParams, X_val: np.ndarray, y_val: np.ndarray) -> float:
    preds = np.atleast_1d(forward(params, X_val))
    resid = preds - y_val
    return float(resid @ resid) / y_val.size


def train_fold(X_train: np.ndarray, y_train: np.ndarray, X_val: np.ndarray,
               y_val: np.ndarray, hidden_units: int, lr: float, l2: float,
               seed, max_epochs: int = 1000, minibatch: int = 8,
               patience_epochs: int = 1) -> FoldResult:
    """Shuffled minibatch Adam with validation-based early stopping.

    Training stops once validation loss fails to improve for
    `patience_epochs` consecutive epochs (or at `max_epochs`); the returned
    parameters are those from the best-validation epoch. A non-finite loss
    flags the fold as diverged.
    """
    X_train = np.atleast_2d(np.asarray(X_train, dtype=float))
    y_train = np.asarray(y_train, dtype=float)
    X_val = np.atleast_2d(np.asarray(X_val, dtype=float))
    y_val = np.atleast_1d(np.asarray(y_val, dtype=float))
    n = y_train.size
    batch = min(minibatch, n)
    rng = np.random.default_rng(seed)
    params = init_params(X_train.shape[1], hidden_units, rng)
    state = AdamState.zeros(params)
    best_params, best_val, best_epoch = params, _val_mse(params, X_val, y_val), 0
    bad_epochs = 0
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            loss, grads = loss_and_grads(params, X_train[idx], y_train[idx], l2)
            if not math.isfinite(loss):
                return FoldResult(params=None, val_mse=float("inf"),
                                  val_rmse=float("inf"), epochs_run=epoch,
                                  diverged=True, diverged_epoch=epoch)
            params, state = adam_step(params, grads, state, lr)
        val = _val_mse(params, X_val, y_val)
        if not math.isfinite(val):
            return FoldResult(params=None, val_mse=float("inf"), val_rmse=float("inf"),
                              epochs_run=epoch, diverged=True, diverged_epoch=epoch)
        if val < best_val:
            best_params, best_val, best_epoch = params, val, epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= patience_epochs:
                break
    return FoldResult(params=best_params, val_mse=best_val,
                      val_rmse=math.sqrt(best_val), epochs_run=epoch, diverged=False)


def _fold_seed(config: NnConfig, lr_idx: int, l2_idx: int, run: int, fold: int):
    # any evaluation order reproduces the same streams
    return np.random.SeedSequence([config.seed, lr_idx, l2_idx, run, fold])


def _scaled(X: np.ndarray, stats_rows: np.ndarray) -> np.ndarray:
    mean = stats_rows.mean(axis=0)
    sd = stats_rows.std(axis=0, ddof=1)
    # a constant column becomes all-zero rather than shifting the input width
    sd = np.where(sd > 0.0, sd, 1.0)
    return (X - mean) / sd


def _run_cell(X: np.ndarray, y: np.ndarray, config: NnConfig, lr_idx: int,
              l2_idx: int) -> tuple[list[float], list[NnParams], int]:
    """All runs x LOO folds for one grid cell; returns held-out squared errors.

    Features are standardized per the config policy: `per-fold` scales each
    fold by its training rows only, `global` by all rows, `none` leaves the
    input untouched.
    """
    n = y.size
    errors: list[float] = []
    fold_params: list[NnParams] = []
    n_diverged = 0
    lr = config.lr_grid[lr_idx]
    l2 = config.l2_grid[l2_idx]
    X_global = _scaled(X, X) if config.standardize_policy == "global" else X
    for run in range(config.runs):
        for fold in range(n):
            train = np.delete(np.arange(n), fold)
            if config.standardize_policy == "per-fold":
                X_use = _scaled(X, X[train])
            else:
                X_use = X_global
            result = train_fold(
                X_use[train], y[train], X_use[fold:fold + 1], y[fold:fold + 1],
                hidden_units=config.hidden_units, lr=lr, l2=l2,
                seed=_fold_seed(config, lr_idx, l2_idx, run, fold),
                max_epochs=config.max_epochs, minibatch=config.minibatch,
                patience_epochs=config.patience_epochs)
            if result.diverged:
                n_diverged += 1
            else:
                errors.append(result.val_mse)
                fold_params.append(result.params)
    return errors, fold_params, n_diverged


@dataclass(frozen=True)
class GridSearchResult:
    err_surface: np.ndarray       # (len(lr_grid), len(l2_grid)); NaN = infeasible
    lr_grid: tuple[float, ...]
    l2_grid: tuple[float, ...]
    lr_star: float
    l2_star: float
    star_indices: tuple[int, int]
    n_diverged: int

    @property
    def err_star(self) -> float:
        return float(self.err_surface[self.star_indices])


def grid_search_loocv(X: np.ndarray, y: np.ndarray,
                      config: NnConfig) -> GridSearchResult:
    """Mean squared held-out error over runs x LOO folds per grid cell.

    The winning cell minimizes that mean; ties break toward the smaller
    learning rate, then the larger l2 coefficient. Cells whose folds all
    diverge are marked infeasible (NaN).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValueError("need at least 3 participants")
    if X.shape != (y.size, config.input_dim):
        raise ValueError(f"X must be (N, {config.input_dim})")
    surface = np.full((len(config.lr_grid), len(config.l2_grid)), np.nan)
    n_diverged = 0
    for i in range(len(config.lr_grid)):
        for j in range(len(config.l2_grid)):
            errors, _, diverged = _run_cell(X, y, config, i, j)
            n_diverged += diverged
            if errors:
                surface[i, j] = float(np.mean(errors))
    if np.all(np.isnan(surface)):
        raise PipelineError("every grid cell diverged")
    best = min(
        ((i, j) for i in range(surface.shape[0]) for j in range(surface.shape[1])
         if not math.isnan(surface[i, j])),
        key=lambda ij: (surface[ij], ij[0], -ij[1]))
    return GridSearchResult(
        err_surface=surface, lr_grid=config.lr_grid, l2_grid=config.l2_grid,
        lr_star=config.lr_grid[best[0]], l2_star=config.l2_grid[best[1]],
        star_indices=best, n_diverged=n_diverged)


@dataclass(frozen=True)
class WeightMap:
    """First-layer relevance per input feature, ROI-major by band."""

    weights: np.ndarray           # (input_dim,)
    runs: int
    n_folds: int
    hidden_units: int
    lr: float
    l2: float

    def normalized(self) -> np.ndarray:
        peak = float(np.max(np.abs(self.weights)))
        return self.weights / peak if peak > 0 else np.copy(self.weights)


def averaged_weights(fold_params: list[NnParams], runs: int, n_folds: int,
                     hidden_units: int, lr: float, l2: float) -> WeightMap:
    """Input weights summed over hidden units, averaged over runs and folds."""
    if not fold_params:
        raise PipelineError("no successful folds to average")
    summed = np.stack([p.W1.sum(axis=0) for p in fold_params])
    return WeightMap(weights=summed.mean(axis=0), runs=runs, n_folds=n_folds,
                     hidden_units=hidden_units, lr=lr, l2=l2)


def weight_heatmap(weight_map: WeightMap, n_rois: int = 14,
                   n_bands: int = 12) -> np.ndarray:
    """Reshape the flat ROI-major weight vector to (ROI, band) for rendering."""
    if weight_map.weights.size != n_rois * n_bands:
        raise ValueError(f"expected {n_rois * n_bands} weights, "
                         f"got {weight_map.weights.size}")
    return weight_map.weights.reshape(n_rois, n_bands)


@dataclass(frozen=True)
class NnRelevanceResult:
    grid: GridSearchResult
    weight_map: WeightMap
    n_folds_averaged: int


def train_relevance(X: np.ndarray, y: np.ndarray,
                    config: NnConfig) -> NnRelevanceResult:
    """Grid search, then re-collect per-fold weights at the winning cell.

    Reuses the winning cell's seeds, so the collected parameters are exactly
    those the search evaluated there.
    """
    grid = grid_search_loocv(X, y, config)
    i, j = grid.star_indices
    _, fold_params, _ = _run_cell(np.asarray(X, dtype=float),
                                  np.asarray(y, dtype=float), config, i, j)
    weight_map = averaged_weights(fold_params, runs=config.runs, n_folds=len(y),
                                  hidden_units=config.hidden_units,
                                  lr=grid.lr_star, l2=grid.l2_star)
    return NnRelevanceResult(grid=grid, weight_map=weight_map,
                             n_folds_averaged=len(fold_params))
