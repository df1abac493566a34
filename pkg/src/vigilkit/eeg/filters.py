"""Zero-phase IIR filtering and integer-ratio decimation."""

from __future__ import annotations

import numpy as np
from scipy import signal

from .io import Recording

BANDPASS_LO_DEFAULT = 1.0
BANDPASS_HI_DEFAULT = 70.0
NOTCH_DEFAULT_HZ = 50.0
TARGET_FS_DEFAULT = 256.0
NYQUIST_MARGIN_HZ = 70.0

_NOTCH_Q = 30.0


def bandpass(rec: Recording, lo_hz: float = BANDPASS_LO_DEFAULT,
             hi_hz: float = BANDPASS_HI_DEFAULT) -> Recording:
    """Forward-backward 4th-order Butterworth band-pass, per channel."""
    nyq = rec.fs_hz / 2.0
    if not (0 < lo_hz < hi_hz < nyq):
        raise ValueError(f"need 0 < lo < hi < Nyquist ({nyq} Hz), got [{lo_hz}, {hi_hz}]")
    sos = signal.butter(4, [lo_hz, hi_hz], btype="bandpass", fs=rec.fs_hz, output="sos")
    return rec.with_data(signal.sosfiltfilt(sos, rec.data, axis=1))


def notch(rec: Recording, f0_hz: float = NOTCH_DEFAULT_HZ) -> Recording:
    """Forward-backward IIR notch at the mains frequency."""
    if not (0 < f0_hz < rec.fs_hz / 2.0):
        raise ValueError(f"notch frequency {f0_hz} Hz must be below Nyquist")
    b, a = signal.iirnotch(f0_hz, Q=_NOTCH_Q, fs=rec.fs_hz)
    return rec.with_data(signal.filtfilt(b, a, rec.data, axis=1))


def decimate(rec: Recording, target_fs_hz: float = TARGET_FS_DEFAULT) -> Recording:
    """Anti-alias low-pass then integer downsample to the target rate."""
    if target_fs_hz < 2.0 * NYQUIST_MARGIN_HZ:
        raise ValueError(
            f"target rate {target_fs_hz} Hz leaves no margin above 2x{NYQUIST_MARGIN_HZ} Hz")
    ratio = rec.fs_hz / target_fs_hz
    q = int(round(ratio))
    if abs(ratio - q) > 1e-9:
        raise ValueError(f"sampling rate {rec.fs_hz} not an integer multiple of {target_fs_hz}")
    if q == 1:
        return rec
    out = signal.decimate(rec.data, q, ftype="fir", axis=1, zero_phase=True)
    return rec.with_data(out, fs_hz=target_fs_hz)
