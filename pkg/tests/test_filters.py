"""Zero-phase filtering and decimation behavior."""

import numpy as np
import pytest

from vigilkit.eeg.filters import bandpass, decimate, notch
from vigilkit.eeg.io import Recording


def tone_recording(freqs_amps, fs=2048.0, seconds=8.0, n_ch=2):
    t = np.arange(int(fs * seconds)) / fs
    sig = sum(a * np.sin(2 * np.pi * f * t) for f, a in freqs_amps)
    data = np.tile(sig, (n_ch, 1))
    return Recording(fs_hz=fs, data=data,
                     channel_names=tuple(f"C{i}" for i in range(n_ch)))


def amplitude_at(rec, freq):
    spectrum = np.abs(np.fft.rfft(rec.data[0]))
    bin_hz = rec.fs_hz / rec.n_samples
    return spectrum[int(round(freq / bin_hz))]


def steady_amplitude_at(rec, freq):
    """Windowed central half, clear of forward-backward edge transients."""
    x = rec.data[0]
    mid = x[len(x) // 4: 3 * len(x) // 4] * np.hanning(len(x) // 2)
    spectrum = np.abs(np.fft.rfft(mid))
    bin_hz = rec.fs_hz / (len(x) // 2)
    return spectrum[int(round(freq / bin_hz))]


class TestNotch:
    def test_mains_tone_attenuated_40db(self):
        rec = tone_recording([(50.0, 10.0), (10.0, 1.0)])
        out = notch(rec)
        before = steady_amplitude_at(rec, 50.0)
        after = steady_amplitude_at(out, 50.0)
        assert 20 * np.log10(before / after) >= 40.0

    def test_neighboring_band_preserved(self):
        rec = tone_recording([(50.0, 10.0), (10.0, 1.0)])
        out = notch(rec)
        assert amplitude_at(out, 10.0) == pytest.approx(amplitude_at(rec, 10.0), rel=0.02)

    def test_rejects_frequency_above_nyquist(self):
        rec = tone_recording([(10.0, 1.0)], fs=128.0)
        with pytest.raises(ValueError, match="Nyquist"):
            notch(rec, f0_hz=80.0)

    def test_zero_phase(self):
        # a slow tone passes with no measurable delay
        rec = tone_recording([(8.0, 1.0)])
        out = notch(rec)
        mid = rec.n_samples // 2
        window = slice(mid - 1024, mid + 1024)
        lag = np.argmax(np.correlate(out.data[0][window], rec.data[0][window], "same"))
        assert abs(lag - 1024) <= 1


class TestBandpass:
    def test_passband_and_stopbands(self):
        rec = tone_recording([(0.2, 1.0), (10.0, 1.0), (200.0, 1.0)])
        out = bandpass(rec, 1.0, 70.0)
        assert amplitude_at(out, 10.0) == pytest.approx(amplitude_at(rec, 10.0), rel=0.05)
        assert amplitude_at(out, 0.2) < 0.05 * amplitude_at(rec, 0.2)
        assert amplitude_at(out, 200.0) < 0.01 * amplitude_at(rec, 200.0)

    def test_bad_edges_rejected(self):
        rec = tone_recording([(10.0, 1.0)], fs=128.0)
        with pytest.raises(ValueError):
            bandpass(rec, 70.0, 1.0)
        with pytest.raises(ValueError):
            bandpass(rec, 1.0, 64.0)

    def test_preserves_shape_and_rate(self):
        rec = tone_recording([(10.0, 1.0)])
        out = bandpass(rec)
        assert out.data.shape == rec.data.shape
        assert out.fs_hz == rec.fs_hz
        assert out.channel_names == rec.channel_names


class TestDecimate:
    def test_integer_ratio_downsample(self):
        rec = tone_recording([(10.0, 1.0)], fs=2048.0, seconds=4.0)
        out = decimate(rec, 256.0)
        assert out.fs_hz == 256.0
        assert out.n_samples == rec.n_samples // 8

    def test_tone_survives(self):
        rec = tone_recording([(10.0, 1.0)], fs=2048.0, seconds=4.0)
        out = decimate(rec, 256.0)
        spectrum = np.abs(np.fft.rfft(out.data[0]))
        peak_hz = np.argmax(spectrum) * out.fs_hz / out.n_samples
        assert peak_hz == pytest.approx(10.0, abs=0.5)

    def test_noninteger_ratio_rejected(self):
        rec = tone_recording([(10.0, 1.0)], fs=1000.0)
        with pytest.raises(ValueError, match="integer multiple"):
            decimate(rec, 256.0)

    def test_identity_when_rate_matches(self):
        rec = tone_recording([(10.0, 1.0)], fs=256.0)
        out = decimate(rec, 256.0)
        assert out is rec

    def test_rejects_rate_below_feature_band(self):
        rec = tone_recording([(10.0, 1.0)], fs=1024.0)
        with pytest.raises(ValueError, match="margin"):
            decimate(rec, 128.0)
