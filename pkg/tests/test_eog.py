"""Ocular artifact regression."""

import numpy as np
import pytest

from vigilkit.eeg.eog import regress_out_eog
from vigilkit.eeg.io import Recording


def contaminated_recording(rng, n_scalp=6, n_samples=5000, gain=3.0):
    source = rng.standard_normal(n_samples).cumsum()
    source -= source.mean()
    source /= source.std()
    scalp = rng.standard_normal((n_scalp, n_samples)) * 0.5
    gains = gain * (0.5 + rng.random(n_scalp))
    scalp += gains[:, None] * source
    eog = np.vstack([source + 0.01 * rng.standard_normal(n_samples),
                     0.8 * source + 0.01 * rng.standard_normal(n_samples)])
    names = tuple(f"S{i}" for i in range(n_scalp)) + ("EXG1", "EXG2")
    rec = Recording(fs_hz=256.0, data=np.vstack([scalp, eog]),
                    channel_names=names, eog_channels=("EXG1", "EXG2"))
    return rec, source


def max_abs_corr(data, reference):
    return max(abs(float(np.corrcoef(row, reference)[0, 1])) for row in data)


class TestRegressOutEog:
    def test_contamination_removed(self, rng):
        rec, source = contaminated_recording(rng)
        assert max_abs_corr(rec.data[:6], source) > 0.8
        cleaned = regress_out_eog(rec)
        assert max_abs_corr(cleaned.data, source) < 0.05

    def test_eog_channels_dropped_from_output(self, rng):
        rec, _ = contaminated_recording(rng)
        cleaned = regress_out_eog(rec)
        assert cleaned.channel_names == tuple(f"S{i}" for i in range(6))
        assert cleaned.eog_channels == ()
        assert cleaned.data.shape == (6, rec.n_samples)

    def test_uncontaminated_signal_preserved(self, rng):
        # scalp orthogonal-ish to EOG stays put
        clean = rng.standard_normal((3, 5000))
        eog = rng.standard_normal((1, 5000))
        rec = Recording(fs_hz=256.0, data=np.vstack([clean, eog]),
                        channel_names=("a", "b", "c", "EXG1"),
                        eog_channels=("EXG1",))
        out = regress_out_eog(rec)
        assert np.allclose(out.data, clean, atol=0.15)
        assert np.corrcoef(out.data[0], clean[0])[0, 1] > 0.99

    def test_zero_variance_eog_dropped_with_warning(self, rng):
        rec, source = contaminated_recording(rng)
        data = rec.data.copy()
        data[-1] = 0.0
        rec = Recording(fs_hz=256.0, data=data, channel_names=rec.channel_names,
                        eog_channels=rec.eog_channels)
        with pytest.warns(UserWarning, match="zero variance"):
            cleaned = regress_out_eog(rec)
        assert max_abs_corr(cleaned.data, source) < 0.05

    def test_all_eog_flat_passes_scalp_through(self, rng):
        scalp = rng.standard_normal((2, 1000))
        data = np.vstack([scalp, np.zeros((1, 1000))])
        rec = Recording(fs_hz=256.0, data=data, channel_names=("a", "b", "EXG1"),
                        eog_channels=("EXG1",))
        with pytest.warns(UserWarning):
            out = regress_out_eog(rec)
        assert np.array_equal(out.data, scalp)

    def test_requires_eog_channels(self, rng):
        rec = Recording(fs_hz=256.0, data=rng.standard_normal((2, 100)),
                        channel_names=("a", "b"))
        with pytest.raises(ValueError, match="no EOG"):
            regress_out_eog(rec)

    def test_residuals_orthogonal_to_regressors(self, rng):
        rec, _ = contaminated_recording(rng)
        eog = rec.data[6:]
        cleaned = regress_out_eog(rec)
        assert np.max(np.abs(cleaned.data @ eog.T)) < 1e-6 * np.max(np.abs(rec.data @ eog.T))
