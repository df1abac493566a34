"""SART event-log parsing, validation, and trial labeling.

An event log is UTF-8 JSON Lines: one header record followed by one record
per trial (schema ``vigilkit-events/1``, see `read_session`). Trials are
labeled Hit / CommissionError / OmissionError / CorrectInhibition from the
digit type and click detection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import IO, Iterable, Iterator

from .errors import ParseError, StructureError

SCHEMA_EVENTS = "vigilkit-events/1"


@dataclass(frozen=True)
class ParadigmSpec:
    """Timing and structure of the fixed-sequence, varying-ISI SART."""

    digit_display_ms: float = 250.0
    response_interval_ms: float = 300.0
    isi_range_ms: tuple[float, float] = (400.0, 1000.0)
    sequences_per_block: int = 25
    blocks: int = 12
    digits: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9)
    target_digit: int = 3

    def __post_init__(self):
        if self.digit_display_ms <= 0 or self.response_interval_ms <= 0:
            raise ValueError("durations must be positive")
        lo, hi = self.isi_range_ms
        if not (0 < lo <= hi):
            raise ValueError(f"bad ISI range {self.isi_range_ms}")
        if self.sequences_per_block < 1 or self.blocks < 1:
            raise ValueError("counts must be >= 1")
        if self.target_digit not in self.digits:
            raise ValueError(f"target digit {self.target_digit} not in digit set")

    @property
    def trials_per_block(self) -> int:
        return self.sequences_per_block * len(self.digits)

    @property
    def trials_per_session(self) -> int:
        return self.trials_per_block * self.blocks

    def to_json_obj(self) -> dict:
        return {
            "digit_display_ms": self.digit_display_ms,
            "response_interval_ms": self.response_interval_ms,
            "isi_range_ms": list(self.isi_range_ms),
            "sequences_per_block": self.sequences_per_block,
            "blocks": self.blocks,
            "digits": list(self.digits),
            "target_digit": self.target_digit,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ParadigmSpec":
        kwargs = {}
        for key in ("digit_display_ms", "response_interval_ms", "sequences_per_block",
                    "blocks", "target_digit"):
            if key in obj:
                kwargs[key] = obj[key]
        if "isi_range_ms" in obj:
            kwargs["isi_range_ms"] = tuple(obj["isi_range_ms"])
        if "digits" in obj:
            kwargs["digits"] = tuple(obj["digits"])
        return cls(**kwargs)


@dataclass(frozen=True)
class TrialEvent:
    """One presented digit with the clicks attributed to its window."""

    trial_index: int          # 1-based
    block: int                # 1-based
    digit: int
    onset_ms: float
    isi_ms: float
    clicks_ms: tuple[float, ...] = ()

    def __post_init__(self):
        if self.trial_index < 1 or self.block < 1:
            raise ValueError("trial_index and block are 1-based")
        if list(self.clicks_ms) != sorted(self.clicks_ms):
            raise ValueError("clicks_ms must be sorted ascending")
        if self.clicks_ms and self.clicks_ms[0] < self.onset_ms:
            raise ValueError("click before trial onset")


class Outcome(Enum):
    HIT = "Hit"
    COMMISSION_ERROR = "CommissionError"
    OMISSION_ERROR = "OmissionError"
    CORRECT_INHIBITION = "CorrectInhibition"


@dataclass(frozen=True)
class LabeledTrial:
    """A trial with its Go/NoGo outcome and first-click response time."""

    event: TrialEvent
    outcome: Outcome
    rt_ms: float | None
    multi_click: bool

    def __post_init__(self):
        has_rt = self.rt_ms is not None
        if self.outcome in (Outcome.HIT, Outcome.COMMISSION_ERROR) and not has_rt:
            raise ValueError(f"{self.outcome.value} requires rt_ms")
        if self.outcome in (Outcome.OMISSION_ERROR, Outcome.CORRECT_INHIBITION) and has_rt:
            raise ValueError(f"{self.outcome.value} must not carry rt_ms")


@dataclass(frozen=True)
class Session:
    participant: str
    paradigm: ParadigmSpec
    trials: tuple[TrialEvent, ...] = field(default=())


def _require(cond: bool, line_no: int, message: str) -> None:
    if not cond:
        raise ParseError(line_no, message)


def read_session(stream: Iterable[str] | IO[str]) -> Session:
    """Parse an event-log stream into a validated Session.

    Clicks are re-assigned to the trial with the greatest onset <= click time
    (a click exactly on a digit onset belongs to the new trial). The window of
    the final trial closes at onset + display + response interval + ISI.
    """
    header = None
    raw_trials: list[tuple[int, dict]] = []
    line_no = 0
    for line in stream:
        line_no += 1
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
        if header is None:
            _require(isinstance(obj, dict) and obj.get("schema") == SCHEMA_EVENTS,
                     line_no, f"first line must be a header with schema {SCHEMA_EVENTS!r}")
            _require("paradigm" in obj, line_no, "header missing 'paradigm'")
            header = obj
        else:
            raw_trials.append((line_no, obj))
    if header is None:
        raise StructureError("empty event log")

    try:
        paradigm = ParadigmSpec.from_json_obj(header["paradigm"])
    except (ValueError, TypeError, KeyError) as exc:
        raise ParseError(1, f"bad paradigm in header: {exc}") from exc
    participant = str(header.get("participant", ""))

    events = []
    all_clicks: list[float] = []
    for ln, obj in raw_trials:
        _require(isinstance(obj, dict), ln, "trial record must be an object")
        for key in ("trial", "block", "digit", "onset_ms", "isi_ms", "clicks_ms"):
            _require(key in obj, ln, f"trial record missing {key!r}")
        digit = obj["digit"]
        _require(isinstance(digit, int) and digit in paradigm.digits,
                 ln, f"digit {digit!r} not in paradigm digit set")
        _require(isinstance(obj["trial"], int) and obj["trial"] >= 1, ln, "bad trial index")
        _require(isinstance(obj["block"], int) and obj["block"] >= 1, ln, "bad block index")
        isi = float(obj["isi_ms"])
        _require(isi > 0, ln, f"isi_ms must be positive, got {isi}")
        clicks = obj["clicks_ms"]
        _require(isinstance(clicks, list), ln, "clicks_ms must be a list")
        events.append({
            "line": ln,
            "trial": obj["trial"],
            "block": obj["block"],
            "digit": digit,
            "onset": float(obj["onset_ms"]),
            "isi": isi,
        })
        all_clicks.extend(float(c) for c in clicks)

    events.sort(key=lambda e: e["trial"])
    indices = [e["trial"] for e in events]
    if indices != list(range(1, len(events) + 1)):
        raise StructureError(f"trial indices not contiguous from 1: {indices[:10]}...")
    onsets = [e["onset"] for e in events]
    if any(b <= a for a, b in zip(onsets, onsets[1:])):
        raise StructureError("trial onsets must be strictly increasing")

    assigned: list[list[float]] = [[] for _ in events]
    if all_clicks:
        if not events:
            raise StructureError("clicks present but no trials")
        all_clicks.sort()
        last = events[-1]
        session_end = (last["onset"] + paradigm.digit_display_ms
                       + paradigm.response_interval_ms + last["isi"])
        i = 0
        for click in all_clicks:
            if click < onsets[0]:
                raise StructureError(f"click at {click} ms precedes first digit onset")
            if click >= session_end:
                raise StructureError(f"click at {click} ms falls after the last trial window")
            # greatest onset <= click; onsets and clicks are both sorted
            while i + 1 < len(onsets) and onsets[i + 1] <= click:
                i += 1
            assigned[i].append(click)

    trials = tuple(
        TrialEvent(
            trial_index=e["trial"], block=e["block"], digit=e["digit"],
            onset_ms=e["onset"], isi_ms=e["isi"], clicks_ms=tuple(clicks),
        )
        for e, clicks in zip(events, assigned)
    )
    return Session(participant=participant, paradigm=paradigm, trials=trials)


def parse_event_log(stream: Iterable[str] | IO[str]) -> tuple[ParadigmSpec, list[TrialEvent]]:
    """Parse an event log, returning the paradigm and the validated trials."""
    session = read_session(stream)
    return session.paradigm, list(session.trials)


def serialize_session(session: Session) -> Iterator[str]:
    """Yield event-log lines (without trailing newlines) for a session."""
    yield json.dumps({
        "schema": SCHEMA_EVENTS,
        "participant": session.participant,
        "paradigm": session.paradigm.to_json_obj(),
    }, separators=(",", ":"))
    for t in session.trials:
        yield json.dumps({
            "trial": t.trial_index,
            "block": t.block,
            "digit": t.digit,
            "onset_ms": t.onset_ms,
            "isi_ms": t.isi_ms,
            "clicks_ms": list(t.clicks_ms),
        }, separators=(",", ":"))


def write_event_log(session: Session, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in serialize_session(session):
            fh.write(line + "\n")


def load_session(path) -> Session:
    with open(path, "r", encoding="utf-8") as fh:
        return read_session(fh)


def label_trials(trials: Iterable[TrialEvent], spec: ParadigmSpec) -> list[LabeledTrial]:
    """Label each trial from its digit type and clicks.

    Non-target with >=1 click -> Hit (rt = first click - onset); non-target
    with none -> OmissionError; target with >=1 click -> CommissionError;
    target with none -> CorrectInhibition. Extra clicks only set multi_click.
    """
    labeled = []
    for t in trials:
        is_target = t.digit == spec.target_digit
        clicked = len(t.clicks_ms) > 0
        rt = t.clicks_ms[0] - t.onset_ms if clicked else None
        if is_target:
            outcome = Outcome.COMMISSION_ERROR if clicked else Outcome.CORRECT_INHIBITION
        else:
            outcome = Outcome.HIT if clicked else Outcome.OMISSION_ERROR
        labeled.append(LabeledTrial(
            event=t, outcome=outcome, rt_ms=rt, multi_click=len(t.clicks_ms) >= 2,
        ))
    return labeled


def shift_times(session: Session, offset_ms: float) -> Session:
    """Return a copy with all onsets and clicks shifted by a constant."""
    shifted = tuple(
        replace(t, onset_ms=t.onset_ms + offset_ms,
                clicks_ms=tuple(c + offset_ms for c in t.clicks_ms))
        for t in session.trials
    )
    return replace(session, trials=shifted)
