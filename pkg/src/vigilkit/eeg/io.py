"""Multichannel recording container and its on-disk formats.

A recording on disk is a JSON sidecar header (schema ``vigilkit-eeg/1``)
next to a raw file of interleaved little-endian float32 frames, where one
frame holds all channels at one instant. CSV import is supported for small
files (header row of channel names, one row per frame).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

SCHEMA_EEG = "vigilkit-eeg/1"


class RestingState(Enum):
    EYES_OPEN = "eo"
    EYES_CLOSED = "ec"


@dataclass(frozen=True)
class Recording:
    """Channels-by-samples signal matrix in microvolts with sampling metadata."""

    fs_hz: float
    data: np.ndarray                       # (n_channels, n_samples)
    channel_names: tuple[str, ...]
    eog_channels: tuple[str, ...] = ()
    state: RestingState = RestingState.EYES_OPEN

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError(f"data must be 2-D (channels x samples), got {self.data.shape}")
        if len(self.channel_names) != self.data.shape[0]:
            raise ValueError("channel_names length must match data rows")
        if len(set(self.channel_names)) != len(self.channel_names):
            raise ValueError("duplicate channel names")
        missing = set(self.eog_channels) - set(self.channel_names)
        if missing:
            raise ValueError(f"EOG channels not in channel_names: {sorted(missing)}")
        if self.fs_hz <= 0:
            raise ValueError("fs_hz must be positive")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("recording contains NaN or Inf samples")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs_hz

    @property
    def scalp_channels(self) -> tuple[str, ...]:
        return tuple(c for c in self.channel_names if c not in self.eog_channels)

    def channel_index(self, name: str) -> int:
        return self.channel_names.index(name)

    def with_data(self, data: np.ndarray, fs_hz: float | None = None) -> "Recording":
        return replace(self, data=data, fs_hz=self.fs_hz if fs_hz is None else fs_hz)


def write_recording(rec: Recording, prefix) -> tuple[Path, Path]:
    """Write ``<prefix>.json`` + ``<prefix>.raw``; returns both paths."""
    prefix = Path(prefix)
    header_path = prefix.with_suffix(".json")
    raw_path = prefix.with_suffix(".raw")
    header = {
        "schema": SCHEMA_EEG,
        "fs_hz": rec.fs_hz,
        "n_channels": rec.n_channels,
        "channel_names": list(rec.channel_names),
        "eog_channels": list(rec.eog_channels),
        "dtype": "float32",
        "byte_order": "little-endian",
        "layout": "sample-major",
        "state": rec.state.value,
        "data_file": raw_path.name,
    }
    header_path.write_text(json.dumps(header, indent=1) + "\n", encoding="utf-8")
    frames = np.ascontiguousarray(rec.data.T, dtype="<f4")   # sample-major interleave
    frames.tofile(raw_path)
    return header_path, raw_path


def read_recording(path) -> Recording:
    """Read a recording given its header path (or path prefix)."""
    path = Path(path)
    if path.suffix != ".json":
        path = path.with_suffix(".json")
    header = json.loads(path.read_text(encoding="utf-8"))
    if header.get("schema") != SCHEMA_EEG:
        raise ValueError(f"{path}: expected schema {SCHEMA_EEG!r}, got {header.get('schema')!r}")
    if header.get("dtype") != "float32" or header.get("byte_order") != "little-endian":
        raise ValueError(f"{path}: unsupported sample encoding")
    raw_path = path.parent / header.get("data_file", path.stem + ".raw")
    n_channels = int(header["n_channels"])
    flat = np.fromfile(raw_path, dtype="<f4")
    if flat.size % n_channels != 0:
        raise ValueError(f"{raw_path}: size not a multiple of {n_channels} channels")
    data = flat.reshape(-1, n_channels).T.astype(np.float64)
    return Recording(
        fs_hz=float(header["fs_hz"]),
        data=data,
        channel_names=tuple(header["channel_names"]),
        eog_channels=tuple(header.get("eog_channels", [])),
        state=RestingState(header.get("state", "eo")),
    )


def read_recording_csv(path, fs_hz: float, eog_channels=(),
                       state: RestingState = RestingState.EYES_OPEN) -> Recording:
    """Import a small CSV: header row of channel names, one row per frame."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        names = tuple(col.strip() for col in fh.readline().strip().split(","))
        frames = np.loadtxt(fh, delimiter=",", ndmin=2)
    if frames.shape[1] != len(names):
        raise ValueError(f"{path}: {frames.shape[1]} columns vs {len(names)} channel names")
    return Recording(fs_hz=fs_hz, data=frames.T, channel_names=names,
                     eog_channels=tuple(eog_channels), state=state)
