import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import numpy as np
import pytest

from vigilkit.session import ParadigmSpec, Session, TrialEvent


def build_trials(spec: ParadigmSpec, clicks_by_trial: dict[int, list[float]],
                 n_trials: int | None = None, isi_ms: float = 700.0):
    """Fixed-order digit stream with explicit click offsets per trial (ms after onset)."""
    n = n_trials if n_trials is not None else spec.trials_per_session
    step = spec.digit_display_ms + spec.response_interval_ms + isi_ms
    trials = []
    for i in range(n):
        onset = 1000.0 + i * step
        offsets = clicks_by_trial.get(i + 1, [])
        trials.append(TrialEvent(
            trial_index=i + 1,
            block=i // spec.trials_per_block + 1,
            digit=spec.digits[i % len(spec.digits)],
            onset_ms=onset,
            isi_ms=isi_ms,
            clicks_ms=tuple(onset + off for off in sorted(offsets)),
        ))
    return trials


@pytest.fixture
def paradigm():
    return ParadigmSpec()


@pytest.fixture
def small_paradigm():
    return ParadigmSpec(sequences_per_block=5, blocks=2)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def session_of(trials, spec: ParadigmSpec, participant: str = "S01") -> Session:
    return Session(participant=participant, paradigm=spec, trials=tuple(trials))
