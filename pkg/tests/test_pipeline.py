"""End-to-end feature extraction from raw recordings."""

import numpy as np
import pytest

from vigilkit.eeg.bands import ROI_LABELS, BandSet, RoiMap
from vigilkit.eeg.io import Recording
from vigilkit.eeg.pipeline import ExtractConfig, ExtractReport, extract_features


def small_roi_map():
    return RoiMap(rois=tuple((label, (f"ch_{label}",)) for label in ROI_LABELS))


def rest_recording(rng, fs=2048.0, seconds=20.0, alpha_amp=6.0):
    roi_map = small_roi_map()
    n = int(fs * seconds)
    t = np.arange(n) / fs
    alpha = np.sin(2 * np.pi * 10.0 * t)
    scalp = rng.standard_normal((14, n)) + alpha_amp * alpha * (0.5 + rng.random((14, 1)))
    eog = rng.standard_normal((2, n)) * 0.3
    names = roi_map.all_channels + ("EXG1", "EXG2")
    rec = Recording(fs_hz=fs, data=np.vstack([scalp, eog]), channel_names=names,
                    eog_channels=("EXG1", "EXG2"))
    return rec, roi_map


class TestExtractFeatures:
    def test_feature_vector_shape_and_simplex(self, rng):
        rec, roi_map = rest_recording(rng)
        feats, report = extract_features(rec, ExtractConfig(roi_map=roi_map))
        assert feats.shape == (168,)
        assert np.all(feats >= 0.0)
        assert feats.reshape(14, 12).sum(axis=1) == pytest.approx(np.ones(14), abs=1e-9)
        assert isinstance(report, ExtractReport)
        assert report.n_components >= 1
        assert report.n_rejected >= 0

    def test_planted_alpha_dominates(self, rng):
        rec, roi_map = rest_recording(rng, alpha_amp=12.0)
        feats, _ = extract_features(rec, ExtractConfig(roi_map=roi_map))
        blocks = feats.reshape(14, 12)
        labels = BandSet().labels()
        alpha = blocks[:, labels.index("8-10")] + blocks[:, labels.index("10-12")]
        assert np.all(alpha > 0.5)

    def test_gain_invariance_through_pipeline(self, rng):
        rec, roi_map = rest_recording(rng)
        config = ExtractConfig(roi_map=roi_map)
        base, _ = extract_features(rec, config)
        scaled, _ = extract_features(rec.with_data(rec.data * 1e3), config)
        assert scaled == pytest.approx(base, abs=1e-9)

    def test_seed_determinism(self, rng):
        rec, roi_map = rest_recording(rng)
        config = ExtractConfig(roi_map=roi_map, seed=3)
        a, _ = extract_features(rec, config)
        b, _ = extract_features(rec, config)
        assert np.array_equal(a, b)

    def test_works_without_eog_channels(self, rng):
        rec, roi_map = rest_recording(rng)
        scalp_only = Recording(fs_hz=rec.fs_hz, data=rec.data[:14],
                               channel_names=rec.channel_names[:14])
        feats, _ = extract_features(scalp_only, ExtractConfig(roi_map=roi_map))
        assert feats.shape == (168,)

    def test_ratio_then_average_flag(self, rng):
        roi_map = RoiMap(rois=tuple(
            (label, ("a1", "a2") if label == "LPF" else (f"ch_{label}",))
            for label in ROI_LABELS))
        n = int(2048 * 20)
        t = np.arange(n) / 2048.0
        data = rng.standard_normal((15, n))
        data[0] = data[0] * 4.0 + 8.0 * np.sin(2 * np.pi * 6.0 * t)
        rec = Recording(fs_hz=2048.0, data=data, channel_names=roi_map.all_channels)
        a, _ = extract_features(rec, ExtractConfig(roi_map=roi_map, seed=1))
        b, _ = extract_features(rec, ExtractConfig(roi_map=roi_map, seed=1,
                                                   ratio_then_average=True))
        assert not np.allclose(a[:12], b[:12], atol=1e-4)
