"""Ocular artifact removal by least-squares regression on the EOG channels."""

from __future__ import annotations

import warnings
from dataclasses import replace

import numpy as np

from .io import Recording


def regress_out_eog(rec: Recording) -> Recording:
    """Subtract each scalp channel's least-squares projection onto the EOG channels.

    Coefficients are fit on the whole recording. Zero-variance EOG channels are
    dropped from the regressor set with a warning; if none remain, the scalp
    data pass through unchanged. EOG channels are removed from the output.
    """
    if not rec.eog_channels:
        raise ValueError("recording has no EOG channels to regress out")
    eog_idx = [rec.channel_index(c) for c in rec.eog_channels]
    scalp_idx = [i for i in range(rec.n_channels) if i not in eog_idx]

    eog = rec.data[eog_idx]
    scalp = rec.data[scalp_idx]

    usable = [k for k in range(eog.shape[0]) if np.var(eog[k]) > 0.0]
    dropped = eog.shape[0] - len(usable)
    if dropped:
        warnings.warn(f"{dropped} EOG channel(s) have zero variance; "
                      f"regressing on the remaining {len(usable)}", stacklevel=2)
    if usable:
        regressors = eog[usable]
        # coefficients B: scalp ~ B @ regressors, one row per scalp channel
        coef, *_ = np.linalg.lstsq(regressors.T, scalp.T, rcond=None)
        cleaned = scalp - coef.T @ regressors
    else:
        cleaned = scalp

    return replace(
        rec,
        data=cleaned,
        channel_names=tuple(rec.channel_names[i] for i in scalp_idx),
        eog_channels=(),
    )
