"""Synthetic sessions, cohorts, and recordings with planted ground truth.

Every generator is a pure function of its parameters and seed. Event logs
follow the full task protocol (12 blocks of 25 digit sequences) driven by a
latent vigilance walk, cohort features are compositional like real
band-power ratios, and recordings carry known band, line-noise, ocular, and
spike plants so the processing pipeline can be verified end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eeg.bands import ROI_LABELS, BandSet, RoiMap, default_roi_map, feature_names
from .eeg.io import Recording, RestingState
from .scoring import RT_LOWER_DEFAULT_MS
from .session import ParadigmSpec, Session, TrialEvent

BLOCK_REST_MS = 5000.0
VIGILANCE_KINDS = ("constant", "linear-decline", "decline-recover", "early-sleep")


@dataclass(frozen=True)
class VigilanceProcess:
    """Bounded mean-reverting walk toward a profile-specific target schedule.

    The latent level lives in [0, 1]; 1 means fully alert. `trough_*` only
    applies to the decline-recover and early-sleep kinds.
    """

    kind: str = "constant"
    level_start: float = 0.9
    level_end: float = 0.9
    trough_level: float = 0.1
    trough_start: float = 0.25
    trough_end: float = 0.6
    reversion: float = 0.15
    walk_sd: float = 0.02

    def __post_init__(self):
        if self.kind not in VIGILANCE_KINDS:
            raise ValueError(f"unknown vigilance kind {self.kind!r}")
        for name in ("level_start", "level_end", "trough_level"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if not 0.0 <= self.trough_start < self.trough_end <= 1.0:
            raise ValueError("need 0 <= trough_start < trough_end <= 1")
        if not 0.0 < self.reversion <= 1.0:
            raise ValueError("reversion must be in (0, 1]")
        if self.walk_sd < 0:
            raise ValueError("walk_sd must be >= 0")

    def target_level(self, frac: float) -> float:
        """Scheduled vigilance at session fraction `frac` in [0, 1]."""
        if self.kind == "constant":
            return self.level_start
        if self.kind == "linear-decline":
            return self.level_start + (self.level_end - self.level_start) * frac
        if self.kind == "decline-recover":
            mid = 0.5 * (self.trough_start + self.trough_end)
            if frac <= mid:
                t = frac / mid if mid > 0 else 1.0
                return self.level_start + (self.trough_level - self.level_start) * t
            t = (frac - mid) / (1.0 - mid) if mid < 1.0 else 1.0
            return self.trough_level + (self.level_end - self.trough_level) * t
        # early-sleep: abrupt trough, then return to the end level
        if self.trough_start <= frac < self.trough_end:
            return self.trough_level
        if frac >= self.trough_end:
            return self.level_end
        return self.level_start

    def simulate(self, n_trials: int, rng: np.random.Generator) -> np.ndarray:
        levels = np.empty(n_trials)
        v = self.level_start
        for t in range(n_trials):
            frac = t / max(n_trials - 1, 1)
            target = self.target_level(frac)
            v = v + self.reversion * (target - v) + self.walk_sd * rng.standard_normal()
            v = min(max(v, 0.0), 1.0)
            levels[t] = v
        return levels


@dataclass(frozen=True)
class ErrorGain:
    """Maps latent vigilance to error probabilities, linear in (1 - vigilance)."""

    commission_max: float = 0.7
    omission_max: float = 0.6

    def __post_init__(self):
        if not (0.0 <= self.commission_max <= 1.0 and 0.0 <= self.omission_max <= 1.0):
            raise ValueError("error probabilities must be in [0, 1]")

    def commission_p(self, vigilance: float) -> float:
        return self.commission_max * (1.0 - vigilance)

    def omission_p(self, vigilance: float) -> float:
        return self.omission_max * (1.0 - vigilance)


@dataclass(frozen=True)
class BehaviorProfile:
    """Complete description of one simulated participant's responding."""

    name: str = "synthetic"
    base_rt_ms: float = 330.0
    rt_noise_sd_ms: float = 45.0
    impulsive_rate: float = 0.02
    double_click_rate: float = 0.01
    slow_gain: float = 0.8
    error_gain: ErrorGain = field(default_factory=ErrorGain)
    vigilance: VigilanceProcess = field(default_factory=VigilanceProcess)
    seed: int = 0

    def __post_init__(self):
        if self.base_rt_ms <= 0:
            raise ValueError("base_rt_ms must be positive")
        if self.rt_noise_sd_ms < 0:
            raise ValueError("rt_noise_sd_ms must be >= 0")
        for name in ("impulsive_rate", "double_click_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.slow_gain < 0:
            raise ValueError("slow_gain must be >= 0")


PROFILE_PRESETS = {
    "steady": lambda seed: BehaviorProfile(
        name="steady", seed=seed,
        vigilance=VigilanceProcess(kind="constant", level_start=0.92)),
    "declining": lambda seed: BehaviorProfile(
        name="declining", seed=seed,
        vigilance=VigilanceProcess(kind="linear-decline",
                                   level_start=0.9, level_end=0.35)),
    "dip-recover": lambda seed: BehaviorProfile(
        name="dip-recover", seed=seed,
        vigilance=VigilanceProcess(kind="decline-recover", level_start=0.9,
                                   trough_level=0.3, level_end=0.85)),
    "early-sleep": lambda seed: BehaviorProfile(
        name="early-sleep", seed=seed,
        vigilance=VigilanceProcess(kind="early-sleep", level_start=0.9,
                                   trough_level=0.03, trough_start=0.2,
                                   trough_end=0.55, level_end=0.8)),
}


def profile_from_name(name: str, seed: int = 0) -> BehaviorProfile:
    try:
        return PROFILE_PRESETS[name](seed)
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from "
                         f"{sorted(PROFILE_PRESETS)}") from None


def gen_session(profile: BehaviorProfile,
                paradigm: ParadigmSpec | None = None,
                participant: str | None = None) -> Session:
    """Simulate a full session of trials with clicks, deterministic by seed.

    Blocks are separated by a rest gap; click times always fall inside
    their trial's window so the log round-trips through the parser.
    """
    paradigm = paradigm or ParadigmSpec()
    rng = np.random.default_rng(profile.seed)
    levels = profile.vigilance.simulate(paradigm.trials_per_session, rng)
    iso_lo, iso_hi = paradigm.isi_range_ms
    trials = []
    now = 0.0
    index = 0
    for block in range(1, paradigm.blocks + 1):
        if block > 1:
            now += BLOCK_REST_MS
        for _ in range(paradigm.sequences_per_block):
            for digit in paradigm.digits:
                isi = float(rng.uniform(iso_lo, iso_hi))
                window = paradigm.digit_display_ms + paradigm.response_interval_ms + isi
                vig = levels[index]
                is_target = digit == paradigm.target_digit
                if is_target:
                    clicked = rng.random() < profile.error_gain.commission_p(vig)
                else:
                    clicked = not (rng.random() < profile.error_gain.omission_p(vig))
                clicks: list[float] = []
                if clicked:
                    if rng.random() < profile.impulsive_rate:
                        rt = float(rng.uniform(120.0, RT_LOWER_DEFAULT_MS - 10.0))
                    else:
                        rt = (profile.base_rt_ms * (1.0 + profile.slow_gain * (1.0 - vig))
                              + float(rng.normal(0.0, profile.rt_noise_sd_ms)))
                    rt = min(max(rt, 90.0), window - 50.0)
                    clicks.append(now + rt)
                    if rng.random() < profile.double_click_rate:
                        second = rt + float(rng.uniform(60.0, 160.0))
                        if second < window - 10.0:
                            clicks.append(now + second)
                trials.append(TrialEvent(trial_index=index + 1, block=block,
                                         digit=digit, onset_ms=now, isi_ms=isi,
                                         clicks_ms=tuple(clicks)))
                now += window
                index += 1
    return Session(participant=participant or profile.name, paradigm=paradigm,
                   trials=tuple(trials))


@dataclass(frozen=True)
class PlantSpec:
    """Linear ground truth planted into a synthetic cohort's features."""

    target_measure: str
    planted_features: tuple[tuple[str, str, float], ...]   # (roi, band label, coef)
    noise_sd: float = 0.05
    n_participants: int = 10

    def __post_init__(self):
        if self.n_participants < 6:
            raise ValueError("need at least 6 participants")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        band_labels = set(BandSet().labels())
        for roi, band, _coef in self.planted_features:
            if roi not in ROI_LABELS:
                raise ValueError(f"unknown ROI label {roi!r}")
            if band not in band_labels:
                raise ValueError(f"unknown band label {band!r}")


@dataclass(frozen=True)
class CohortData:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    participant_ids: tuple[str, ...]
    coefficients: np.ndarray       # dense ground truth, one entry per feature
    planted_indices: tuple[int, ...]


def gen_cohort(plant: PlantSpec, seed: int = 0,
               bands: BandSet | None = None) -> CohortData:
    """Compositional feature rows plus a linear target with Gaussian noise.

    Each ROI's 12 ratios are an independent flat Dirichlet draw, so rows
    satisfy the same per-ROI sum-to-one invariant as extracted features.
    """
    bands = bands or BandSet()
    names = feature_names(default_roi_map(), bands)
    n_bands = len(bands.labels())
    rng = np.random.default_rng(seed)
    n = plant.n_participants
    X = np.empty((n, len(names)))
    for r in range(len(ROI_LABELS)):
        block = rng.gamma(1.0, 1.0, size=(n, n_bands))
        X[:, r * n_bands:(r + 1) * n_bands] = block / block.sum(axis=1, keepdims=True)
    coef = np.zeros(len(names))
    planted = []
    lookup = {name: i for i, name in enumerate(names)}
    for roi, band, value in plant.planted_features:
        idx = lookup[f"{roi}_{band}"]
        coef[idx] += value
        planted.append(idx)
    y = X @ coef + plant.noise_sd * rng.standard_normal(n)
    ids = tuple(f"S{i + 1:02d}" for i in range(n))
    return CohortData(X=X, y=y, feature_names=tuple(names), participant_ids=ids,
                      coefficients=coef, planted_indices=tuple(sorted(set(planted))))


def _band_limited_noise(rng: np.random.Generator, n_samples: int, fs_hz: float,
                        lo_hz: float, hi_hz: float) -> np.ndarray:
    """Unit-variance noise whose spectrum is confined to [lo, hi) Hz."""
    spectrum = np.fft.rfft(rng.standard_normal(n_samples))
    freqs = np.fft.rfftfreq(n_samples, 1.0 / fs_hz)
    spectrum[(freqs < lo_hz) | (freqs >= hi_hz)] = 0.0
    x = np.fft.irfft(spectrum, n_samples)
    sd = x.std()
    return x / sd if sd > 0 else x


@dataclass(frozen=True)
class BandPlant:
    """Band-limited activity added to one ROI's channels (or `roi="all"`)."""

    roi: str
    lo_hz: float
    hi_hz: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.roi != "all" and self.roi not in ROI_LABELS:
            raise ValueError(f"unknown ROI label {self.roi!r}")
        if not 0 < self.lo_hz < self.hi_hz:
            raise ValueError("need 0 < lo_hz < hi_hz")


@dataclass(frozen=True)
class SpikePlant:
    """Brief large-amplitude transients on one channel."""

    channel: str
    n_spikes: int = 15
    amplitude: float = 150.0
    width_samples: int = 4


@dataclass(frozen=True)
class OcularPlant:
    """Slow ocular source mixed into every scalp channel with known gains."""

    amplitude: float = 40.0
    scalp_gain_range: tuple[float, float] = (0.3, 0.9)
    lo_hz: float = 0.3
    hi_hz: float = 4.0


@dataclass(frozen=True)
class RecordingPlan:
    fs_hz: float = 2048.0
    duration_s: float = 20.0
    noise_sd: float = 1.0
    band_plants: tuple[BandPlant, ...] = ()
    line_amplitude: float = 0.0
    line_hz: float = 50.0
    ocular: OcularPlant | None = None
    spikes: tuple[SpikePlant, ...] = ()
    eog_names: tuple[str, ...] = ("EXG1", "EXG2")
    state: RestingState = RestingState.EYES_OPEN
    seed: int = 0

    def __post_init__(self):
        if self.duration_s < 10.0:
            raise ValueError("duration must be at least 10 s")
        if self.fs_hz <= 0:
            raise ValueError("fs_hz must be positive")


@dataclass(frozen=True)
class RecordingTruth:
    """Ground truth for a generated recording, for recovery tests."""

    eog_source: np.ndarray | None
    eog_gains: np.ndarray | None          # per scalp channel
    spike_positions: dict[str, np.ndarray]


def gen_recording(plan: RecordingPlan,
                  roi_map: RoiMap | None = None) -> tuple[Recording, RecordingTruth]:
    """Multichannel recording assembled from the plan's plants plus noise."""
    roi_map = roi_map or default_roi_map()
    scalp = list(roi_map.all_channels)
    n_samples = round(plan.fs_hz * plan.duration_s)
    rng = np.random.default_rng(plan.seed)
    data = plan.noise_sd * rng.standard_normal((len(scalp), n_samples))
    index = {name: i for i, name in enumerate(scalp)}

    for bp in plan.band_plants:
        channels = scalp if bp.roi == "all" else roi_map.channels(bp.roi)
        for name in channels:
            data[index[name]] += bp.amplitude * _band_limited_noise(
                rng, n_samples, plan.fs_hz, bp.lo_hz, bp.hi_hz)

    if plan.line_amplitude > 0:
        t = np.arange(n_samples) / plan.fs_hz
        data += plan.line_amplitude * np.sin(2.0 * math.pi * plan.line_hz * t)

    eog_source = None
    eog_gains = None
    eog_rows = np.empty((0, n_samples))
    if plan.ocular is not None:
        oc = plan.ocular
        eog_source = oc.amplitude * _band_limited_noise(rng, n_samples, plan.fs_hz,
                                                        oc.lo_hz, oc.hi_hz)
        eog_gains = rng.uniform(*oc.scalp_gain_range, size=len(scalp))
        data += np.outer(eog_gains, eog_source)
        # EOG electrodes see the source nearly cleanly
        eog_rows = np.vstack([
            eog_source + 0.02 * oc.amplitude * rng.standard_normal(n_samples)
            for _ in plan.eog_names])

    spike_positions: dict[str, np.ndarray] = {}
    for sp in plan.spikes:
        if sp.channel not in index:
            raise ValueError(f"spike channel {sp.channel!r} not in the montage")
        positions = np.sort(rng.choice(n_samples - sp.width_samples,
                                       size=sp.n_spikes, replace=False))
        for pos in positions:
            data[index[sp.channel], pos:pos + sp.width_samples] += sp.amplitude
        spike_positions[sp.channel] = positions

    if plan.ocular is not None:
        all_data = np.vstack([data, eog_rows])
        names = tuple(scalp) + tuple(plan.eog_names)
        eog_channels = tuple(plan.eog_names)
    else:
        all_data = data
        names = tuple(scalp)
        eog_channels = ()
    recording = Recording(fs_hz=plan.fs_hz, data=all_data, channel_names=names,
                          eog_channels=eog_channels, state=plan.state)
    return recording, RecordingTruth(eog_source=eog_source, eog_gains=eog_gains,
                                     spike_positions=spike_positions)
