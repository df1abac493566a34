"""Logistic Infomax ICA with natural-gradient updates and annealed learning rate.

Data are PCA-whitened internally (with rank reduction when the covariance is
degenerate), a square unmixing matrix is learned in the whitened space, and
components are returned unit-variance. Artifact components are flagged from
z-scored time courses and removed by back-projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PipelineError

MAX_SWEEPS_DEFAULT = 512
WEIGHT_TOL_DEFAULT = 1e-6
REJECT_MAX_Z = 5.0
REJECT_MAX_KURTOSIS = 8.0

_ANNEAL_DEG = 60.0
_ANNEAL_STEP = 0.9
_BLOWUP_LIMIT = 1e8


@dataclass(frozen=True)
class IcaResult:
    unmixing: np.ndarray        # (k, n_channels), includes whitening
    mixing: np.ndarray          # (n_channels, k), pseudo-inverse of unmixing
    ics: np.ndarray             # (k, n_samples), unit variance
    channel_means: np.ndarray   # (n_channels,)
    converged: bool
    n_sweeps: int
    final_weight_change: float
    n_components: int


def _whiten(data: np.ndarray, n_components: int | None):
    n_ch, n_samples = data.shape
    means = data.mean(axis=1)
    centered = data - means[:, None]
    cov = centered @ centered.T / n_samples
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    if n_components is None:
        tol = eigvals[0] * max(n_ch, n_samples) * np.finfo(float).eps
        n_components = max(1, int(np.sum(eigvals > tol)))
    eigvals = eigvals[:n_components]
    eigvecs = eigvecs[:, :n_components]
    sphering = (eigvecs / np.sqrt(eigvals)).T     # (k, n_ch)
    return centered, means, sphering, n_components


def infomax_ica(
    data: np.ndarray,
    seed: int = 0,
    n_components: int | None = None,
    max_sweeps: int = MAX_SWEEPS_DEFAULT,
    weight_tol: float = WEIGHT_TOL_DEFAULT,
) -> IcaResult:
    """Run logistic Infomax on a channels-by-samples matrix.

    The unmixing matrix is trained with natural-gradient updates over shuffled
    sample blocks; the learning rate anneals when successive weight updates
    change direction by more than 60 degrees. Convergence is a weight-change
    norm below `weight_tol`; otherwise the last iterate is returned flagged.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("data must be channels x samples")
    n_ch, n_samples = data.shape
    if n_samples < 20 * n_ch:
        raise ValueError(f"need at least 20 samples per channel, got {n_samples}/{n_ch}")

    centered, means, sphering, k = _whiten(data, n_components)
    white = sphering @ centered                   # (k, T), identity covariance

    rng = np.random.default_rng(seed)
    block = max(1, min(n_samples, int(np.floor(np.sqrt(n_samples / 3.0)))))
    lrate = 0.00065 / max(np.log(k), 1.0)
    weights = np.eye(k)
    identity_b = np.eye(k)

    olddelta = None
    oldchange = None
    converged = False
    wchange = np.inf
    sweep = 0
    while sweep < max_sweeps:
        sweep += 1
        start_weights = weights.copy()
        perm = rng.permutation(n_samples)
        blown_up = False
        for t0 in range(0, n_samples - block + 1, block):
            chunk = white[:, perm[t0:t0 + block]]
            u = weights @ chunk
            y = 1.0 / (1.0 + np.exp(-u))
            weights = weights + lrate * (identity_b + (1.0 - 2.0 * y) @ u.T / block) @ weights
            if not np.all(np.isfinite(weights)) or np.max(np.abs(weights)) > _BLOWUP_LIMIT:
                blown_up = True
                break
        if blown_up:
            lrate *= 0.5
            weights = np.eye(k)
            olddelta = None
            oldchange = None
            if lrate < 1e-12:
                break
            continue
        delta = weights - start_weights
        wchange = float(np.sqrt(np.sum(delta * delta)))
        if wchange < weight_tol:
            converged = True
            break
        if olddelta is not None:
            denom = np.sqrt(wchange * wchange * oldchange * oldchange)
            if denom > 0:
                cosangle = np.clip(float(np.sum(delta * olddelta)) / denom, -1.0, 1.0)
                if np.degrees(np.arccos(cosangle)) > _ANNEAL_DEG:
                    lrate *= _ANNEAL_STEP
                    olddelta = delta
                    oldchange = wchange
        else:
            olddelta = delta
            oldchange = wchange

    sources = weights @ white
    sds = sources.std(axis=1)
    sds[sds == 0.0] = 1.0
    unmixing = (weights / sds[:, None]) @ sphering
    ics = unmixing @ centered
    mixing = np.linalg.pinv(unmixing)

    return IcaResult(
        unmixing=unmixing, mixing=mixing, ics=ics, channel_means=means,
        converged=converged, n_sweeps=sweep, final_weight_change=wchange,
        n_components=k,
    )


def _excess_kurtosis(x: np.ndarray) -> float:
    centered = x - x.mean()
    m2 = np.mean(centered ** 2)
    if m2 == 0.0:
        return np.inf
    return float(np.mean(centered ** 4) / m2 ** 2 - 3.0)


def reject_artifact_ics(
    ics: np.ndarray,
    max_z: float = REJECT_MAX_Z,
    max_excess_kurtosis: float = REJECT_MAX_KURTOSIS,
) -> np.ndarray:
    """Keep-mask over components; artifacts trip the |z| or kurtosis threshold.

    Each component time course is z-scored first. Constant components are
    rejected by convention. Raises when nothing survives.
    """
    ics = np.asarray(ics, dtype=float)
    keep = np.ones(ics.shape[0], dtype=bool)
    for i, comp in enumerate(ics):
        sd = comp.std()
        if sd == 0.0:
            keep[i] = False
            continue
        z = (comp - comp.mean()) / sd
        if np.max(np.abs(z)) > max_z or _excess_kurtosis(z) > max_excess_kurtosis:
            keep[i] = False
    if not keep.any():
        raise PipelineError("all independent components flagged as artifacts")
    return keep


def reconstruct(ics: np.ndarray, mask: np.ndarray, mixing: np.ndarray,
                channel_means: np.ndarray | None = None) -> np.ndarray:
    """Back-project the kept components to channel space."""
    ics = np.asarray(ics, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape[0] != ics.shape[0] or mixing.shape[1] != ics.shape[0]:
        raise ValueError("mask/mixing dimensions do not match the component count")
    if not mask.any():
        raise ValueError("mask keeps no components")
    kept = np.where(mask)[0]
    data = mixing[:, kept] @ ics[kept]
    if channel_means is not None:
        data = data + np.asarray(channel_means, dtype=float)[:, None]
    return data


def amari_index(estimated_unmixing: np.ndarray, true_mixing: np.ndarray) -> float:
    """Permutation- and scale-invariant separation error in [0, ~1]; 0 is perfect."""
    p = np.abs(np.asarray(estimated_unmixing) @ np.asarray(true_mixing))
    k = p.shape[0]
    if p.shape != (k, k):
        raise ValueError(f"product must be square, got {p.shape}")
    row_term = float(np.sum(p.sum(axis=1) / p.max(axis=1) - 1.0))
    col_term = float(np.sum(p.sum(axis=0) / p.max(axis=0) - 1.0))
    return (row_term + col_term) / (2.0 * k * (k - 1))
