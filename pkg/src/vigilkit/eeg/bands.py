"""Frequency bands, scalp regions of interest, and band-power-ratio features.

The feature vector is ROI-major: for each of the 14 regions, the 12 band
ratios in band order. Ratios within one ROI are normalized by the sum over
the 12 bands, so each ROI's block sums to one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import PipelineError
from .io import Recording

ROI_LABELS = ("LPF", "MPF", "RPF", "LF", "MF", "RF", "LC", "MC", "RC",
              "LP", "MP", "RP", "LT", "RT")

DEFAULT_BAND_EDGES = (
    (1.0, 4.0), (4.0, 8.0), (8.0, 10.0), (10.0, 12.0),
    (12.0, 16.0), (16.0, 20.0), (20.0, 24.0), (24.0, 28.0),
    (28.0, 32.0), (32.0, 36.0), (36.0, 42.0), (42.0, 48.0),
)


@dataclass(frozen=True)
class BandSet:
    """Ordered, contiguous, non-overlapping [lo, hi) frequency intervals."""

    edges: tuple[tuple[float, float], ...] = DEFAULT_BAND_EDGES

    def __post_init__(self):
        if len(self.edges) != 12:
            raise ValueError(f"expected 12 bands, got {len(self.edges)}")
        for lo, hi in self.edges:
            if not lo < hi:
                raise ValueError(f"bad band [{lo}, {hi})")
        for (_, hi), (lo2, _) in zip(self.edges, self.edges[1:]):
            if hi != lo2:
                raise ValueError("bands must be contiguous and sorted")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def lo_hz(self) -> float:
        return self.edges[0][0]

    @property
    def hi_hz(self) -> float:
        return self.edges[-1][1]

    def labels(self) -> list[str]:
        return [f"{lo:g}-{hi:g}" for lo, hi in self.edges]

    @classmethod
    def from_json_file(cls, path) -> "BandSet":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(edges=tuple((float(lo), float(hi)) for lo, hi in obj["bands"]))


@dataclass(frozen=True)
class RoiMap:
    """Mapping from the 14 ROI labels to disjoint sets of scalp channels."""

    rois: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        labels = [name for name, _ in self.rois]
        if tuple(labels) != ROI_LABELS:
            raise ValueError(f"ROI labels must be exactly {ROI_LABELS} in order, got {tuple(labels)}")
        seen: set[str] = set()
        for name, channels in self.rois:
            if not channels:
                raise ValueError(f"ROI {name} is empty")
            overlap = seen & set(channels)
            if overlap:
                raise ValueError(f"channels in more than one ROI: {sorted(overlap)}")
            seen |= set(channels)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.rois)

    def channels(self, roi: str) -> tuple[str, ...]:
        for name, chans in self.rois:
            if name == roi:
                return chans
        raise KeyError(roi)

    @property
    def all_channels(self) -> tuple[str, ...]:
        return tuple(c for _, chans in self.rois for c in chans)

    @classmethod
    def from_dict(cls, mapping: dict) -> "RoiMap":
        return cls(rois=tuple((label, tuple(mapping[label])) for label in ROI_LABELS))

    @classmethod
    def from_json_file(cls, path) -> "RoiMap":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def default_roi_map() -> RoiMap:
    """The 64-channel 10-20 montage grouping shipped with the package."""
    text = resources.files("vigilkit.data").joinpath("roi_biosemi64.json").read_text("utf-8")
    return RoiMap.from_dict(json.loads(text))


def feature_names(rois: RoiMap, bands: BandSet) -> list[str]:
    return [f"{roi}_{band}" for roi in rois.labels for band in bands.labels()]


def channel_band_powers(data: np.ndarray, fs_hz: float, bands: BandSet) -> np.ndarray:
    """Per-channel band power: sum of squared FFT magnitudes in each [lo, hi)."""
    spectrum = np.fft.rfft(data, axis=1)
    freqs = np.fft.rfftfreq(data.shape[1], d=1.0 / fs_hz)
    powers = np.empty((data.shape[0], len(bands)))
    for b, (lo, hi) in enumerate(bands.edges):
        sel = (freqs >= lo) & (freqs < hi)
        powers[:, b] = np.sum(np.abs(spectrum[:, sel]) ** 2, axis=1)
    return powers


def band_power_ratios(rec: Recording, bands: BandSet | None = None,
                      rois: RoiMap | None = None,
                      ratio_then_average: bool = False) -> np.ndarray:
    """BP-ROI feature vector: 14 ROIs x 12 band-power ratios, ROI-major.

    Default aggregation averages channel band powers within each ROI before
    normalizing; `ratio_then_average` normalizes per channel first instead.
    """
    bands = bands or BandSet()
    rois = rois or default_roi_map()
    if rec.duration_s < 10.0:
        raise ValueError(f"recording too short ({rec.duration_s:.1f} s); need >= 10 s")
    if bands.hi_hz > rec.fs_hz / 2.0:
        raise ValueError(f"band edge {bands.hi_hz} Hz above Nyquist")
    missing = set(rois.all_channels) - set(rec.channel_names)
    if missing:
        raise ValueError(f"ROI channels absent from recording: {sorted(missing)}")

    powers = channel_band_powers(rec.data, rec.fs_hz, bands)
    out = np.empty(len(rois.labels) * len(bands))
    for r, roi in enumerate(rois.labels):
        idx = [rec.channel_index(c) for c in rois.channels(roi)]
        if ratio_then_average:
            chan = powers[idx]
            totals = chan.sum(axis=1, keepdims=True)
            if np.any(totals == 0.0):
                raise PipelineError(f"zero total band power in a channel of ROI {roi}")
            block = (chan / totals).mean(axis=0)
        else:
            roi_power = powers[idx].mean(axis=0)
            total = roi_power.sum()
            if total == 0.0:
                raise PipelineError(f"zero total band power in ROI {roi}")
            block = roi_power / total
        out[r * len(bands):(r + 1) * len(bands)] = block
    return out
