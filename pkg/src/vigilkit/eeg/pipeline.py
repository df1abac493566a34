"""End-to-end feature extraction from a raw resting-state recording."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import filters
from .bands import BandSet, RoiMap, band_power_ratios, default_roi_map
from .eog import regress_out_eog
from .ica import (MAX_SWEEPS_DEFAULT, REJECT_MAX_KURTOSIS, REJECT_MAX_Z,
                  infomax_ica, reconstruct, reject_artifact_ics)
from .io import Recording


@dataclass(frozen=True)
class ExtractConfig:
    bands: BandSet = field(default_factory=BandSet)
    roi_map: RoiMap = field(default_factory=default_roi_map)
    bandpass_lo_hz: float = filters.BANDPASS_LO_DEFAULT
    bandpass_hi_hz: float = filters.BANDPASS_HI_DEFAULT
    notch_hz: float = filters.NOTCH_DEFAULT_HZ
    target_fs_hz: float = filters.TARGET_FS_DEFAULT
    seed: int = 0
    ica_max_sweeps: int = MAX_SWEEPS_DEFAULT
    reject_max_z: float = REJECT_MAX_Z
    reject_max_kurtosis: float = REJECT_MAX_KURTOSIS
    ratio_then_average: bool = False


@dataclass(frozen=True)
class ExtractReport:
    """Provenance for one extraction run."""

    n_components: int
    n_rejected: int
    ica_converged: bool
    ica_sweeps: int


def extract_features(raw: Recording, config: ExtractConfig | None = None) -> tuple[np.ndarray, ExtractReport]:
    """Run the full preprocessing chain and return the 168-dim BP-ROI vector.

    Stages, in order: band-pass, notch, decimation, EOG regression, Infomax
    ICA, artifact-component rejection, back-projection, band-power ratios.
    """
    config = config or ExtractConfig()
    rec = filters.bandpass(raw, config.bandpass_lo_hz, config.bandpass_hi_hz)
    rec = filters.notch(rec, config.notch_hz)
    rec = filters.decimate(rec, config.target_fs_hz)
    if rec.eog_channels:
        rec = regress_out_eog(rec)
    ica = infomax_ica(rec.data, seed=config.seed, max_sweeps=config.ica_max_sweeps)
    keep = reject_artifact_ics(ica.ics, max_z=config.reject_max_z,
                               max_excess_kurtosis=config.reject_max_kurtosis)
    cleaned = rec.with_data(reconstruct(ica.ics, keep, ica.mixing, ica.channel_means))
    features = band_power_ratios(cleaned, config.bands, config.roi_map,
                                 ratio_then_average=config.ratio_then_average)
    report = ExtractReport(
        n_components=ica.n_components,
        n_rejected=int(np.sum(~keep)),
        ica_converged=ica.converged,
        ica_sweeps=ica.n_sweeps,
    )
    return features, report
