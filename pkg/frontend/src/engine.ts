import {
  DEFAULT_PARADIGM,
  ParadigmSpec,
  blockOf,
  digitAt,
  trialsPerBlock,
  trialsPerSession,
  validateParadigm,
} from "./paradigm.js";
import { mulberry32, shuffle, uniform } from "./rng.js";
import {
  LabeledTrial,
  SummaryMeasures,
  Thresholds,
  VigilanceTracker,
  labelTrial,
} from "./scoring.js";
import { TrialRecord, serializeEventLog } from "./events.js";

export type RunnerState = "idle" | "practice" | "running" | "block-rest" | "done";

export interface JitterAnnotation {
  trial: number; // 1-based task trial index
  lagMs: number; // actual onset minus scheduled onset
}

export interface RunnerConfig {
  participant: string;
  seed: number;
  paradigm?: ParadigmSpec;
  /** One randomized digit sequence before the task; excluded from
   * calibration and from the export. */
  practice?: boolean;
  leadInMs?: number;
  blockRestMs?: number;
  /** Presentation lag beyond this is recorded as a timing annotation. */
  jitterToleranceMs?: number;
  calibTrials?: number;
  cvsWindow?: number;
  rtLowerMs?: number;
}

export function insertSorted(values: number[], v: number): void {
  let i = values.length;
  while (i > 0 && values[i - 1] > v) i--;
  values.splice(i, 0, v);
}

type BoundaryKind = "none" | "rest" | "done";

/** Drives one task session. The caller advances time with tick(nowMs)
 * (a frame callback in the browser, explicit timestamps in tests) and feeds
 * clicks with click(nowMs); both use the same clock. Digits appear in fixed
 * order, ISIs come from a seeded generator, and each block ends in a rest
 * period. Onsets are recorded at actual presentation time; the next onset is
 * rescheduled from the actual one, and lag beyond the tolerance is annotated
 * rather than hidden. */
export class RunnerSession {
  readonly spec: ParadigmSpec;
  readonly participant: string;
  readonly practiceEnabled: boolean;
  readonly leadInMs: number;
  readonly blockRestMs: number;
  readonly jitterToleranceMs: number;
  readonly totalTrials: number;
  readonly perBlock: number;

  private readonly isis: number[];
  private readonly practiceDigits: number[];
  private readonly practiceIsis: number[];
  private readonly tracker: VigilanceTracker;

  private _state: RunnerState = "idle";
  private _trials: TrialRecord[] = [];
  private windowEnds: number[] = [];
  private finalized = 0;
  private _practiceTrials: TrialRecord[] = [];
  private practiceWindowEnds: number[] = [];
  private scheduledOnset = Infinity;
  private boundaryAt = NaN;
  private boundaryKind: BoundaryKind = "none";
  private _discardedClicks = 0;
  private _annotations: JitterAnnotation[] = [];
  private _aborted = false;

  constructor(config: RunnerConfig) {
    const src = config.paradigm ?? DEFAULT_PARADIGM;
    this.spec = {
      ...src,
      isiRangeMs: [src.isiRangeMs[0], src.isiRangeMs[1]],
      digits: [...src.digits],
    };
    validateParadigm(this.spec);
    this.participant = config.participant;
    this.practiceEnabled = config.practice ?? false;
    this.leadInMs = config.leadInMs ?? 1000;
    this.blockRestMs = config.blockRestMs ?? 5000;
    this.jitterToleranceMs = config.jitterToleranceMs ?? 20;
    this.totalTrials = trialsPerSession(this.spec);
    this.perBlock = trialsPerBlock(this.spec);

    const [lo, hi] = this.spec.isiRangeMs;
    const isiRng = mulberry32(config.seed);
    this.isis = Array.from({ length: this.totalTrials }, () => uniform(isiRng, lo, hi));
    // independent stream so toggling practice never shifts the task ISIs
    const practiceRng = mulberry32((config.seed ^ 0x9e3779b9) >>> 0);
    this.practiceDigits = shuffle(practiceRng, [...this.spec.digits]);
    this.practiceIsis = Array.from({ length: this.practiceDigits.length }, () =>
      uniform(practiceRng, lo, hi),
    );
    this.tracker = new VigilanceTracker({
      calibTrials: config.calibTrials,
      window: config.cvsWindow,
      rtLowerMs: config.rtLowerMs,
    });
  }

  get state(): RunnerState {
    return this._state;
  }

  /** Presented task trials, the last of which may still accept clicks. */
  get trials(): readonly TrialRecord[] {
    return this._trials;
  }

  get practiceTrials(): readonly TrialRecord[] {
    return this._practiceTrials;
  }

  /** Trials whose click windows are closed and which are scored and
   * exportable. */
  get finalizedTrialCount(): number {
    return this.finalized;
  }

  get discardedClicks(): number {
    return this._discardedClicks;
  }

  get annotations(): readonly JitterAnnotation[] {
    return this._annotations;
  }

  get aborted(): boolean {
    return this._aborted;
  }

  get liveCvs(): number | null {
    return this.tracker.liveCvs;
  }

  get cvsTrace(): readonly number[] {
    return this.tracker.trace;
  }

  get tvsLevels(): readonly number[] {
    return this.tracker.levels;
  }

  get thresholds(): Thresholds | null {
    return this.tracker.thresholds;
  }

  start(nowMs: number): void {
    if (this._state !== "idle") throw new Error("session already started");
    this._state = this.practiceEnabled ? "practice" : "running";
    this.scheduledOnset = nowMs + this.leadInMs;
  }

  /** Next instant the engine needs a tick; Infinity when idle or done. */
  nextDueAt(): number {
    if (this._state === "idle" || this._state === "done") return Infinity;
    const boundary = Number.isNaN(this.boundaryAt) ? Infinity : this.boundaryAt;
    return Math.min(this.scheduledOnset, boundary);
  }

  tick(nowMs: number): void {
    if (this._state === "idle" || this._state === "done") return;
    for (;;) {
      if (!Number.isNaN(this.boundaryAt) && nowMs >= this.boundaryAt) {
        const at = this.boundaryAt;
        const kind = this.boundaryKind;
        this.boundaryAt = NaN;
        this.boundaryKind = "none";
        this.finalizeOpenTrial();
        if (kind === "done") {
          this._state = "done";
          return;
        }
        this._state = "block-rest";
        this.scheduledOnset = at + this.blockRestMs;
        continue;
      }
      if (nowMs >= this.scheduledOnset) {
        if (this._state === "practice") this.presentPractice(nowMs);
        else this.presentTrial(nowMs);
        continue;
      }
      return;
    }
  }

  /** Record a click at nowMs. Clicks while idle or done, during block rest,
   * during the lead-in, or delivered late for an already scored trial are
   * discarded and counted. Otherwise the click joins the trial with the
   * greatest onset at or before it, the same rule the offline parser applies
   * on re-import. */
  click(nowMs: number): void {
    if (this._state === "idle" || this._state === "done") {
      this._discardedClicks++;
      return;
    }
    if (this._trials.length === 0) {
      // practice phase or lead-in; practice clicks never export
      const ok = this.tryAssign(
        nowMs,
        this._practiceTrials,
        this.practiceWindowEnds,
        0,
        (index) => index === this.practiceDigits.length,
      );
      if (!ok) this._discardedClicks++;
      return;
    }
    const ok = this.tryAssign(
      nowMs,
      this._trials,
      this.windowEnds,
      this.finalized,
      (index) => index === this.totalTrials || index % this.perBlock === 0,
    );
    if (!ok) this._discardedClicks++;
  }

  /** Stop now. Any trial still accepting clicks is dropped so the export
   * holds only completed trials. */
  abort(nowMs: number): void {
    if (this._state === "idle" || this._state === "done") return;
    this.tick(nowMs); // the tick may already have ended the session
    this.dropOpenTrialAndStop();
  }

  private dropOpenTrialAndStop(): void {
    if (this._state === "done") return;
    this._trials.length = this.finalized;
    this.windowEnds.length = this.finalized;
    this.boundaryAt = NaN;
    this.boundaryKind = "none";
    this.scheduledOnset = Infinity;
    this._aborted = true;
    this._state = "done";
  }

  /** Event log (JSON Lines) of the completed trials. */
  exportLog(): string {
    return serializeEventLog(
      this.participant,
      this.spec,
      this._trials.slice(0, this.finalized),
    );
  }

  /** Digit on screen at nowMs, or null during blanks and rest periods. */
  currentDigit(nowMs: number): number | null {
    if (this._state === "idle" || this._state === "done") return null;
    const recs = this._state === "practice" ? this._practiceTrials : this._trials;
    const last = recs[recs.length - 1];
    if (!last) return null;
    const visible = nowMs >= last.onsetMs && nowMs < last.onsetMs + this.spec.digitDisplayMs;
    return visible ? last.digit : null;
  }

  /** The six session measures over the trials scored so far. */
  summary(): SummaryMeasures {
    return this.tracker.summary();
  }

  private finalizeOpenTrial(): void {
    while (this.finalized < this._trials.length) {
      const rec = this._trials[this.finalized];
      const labeled: LabeledTrial = labelTrial(
        rec.digit === this.spec.targetDigit,
        rec.clicksMs,
        rec.onsetMs,
      );
      this.tracker.push(labeled);
      this.finalized++;
    }
  }

  private presentTrial(nowMs: number): void {
    this.finalizeOpenTrial(); // the previous trial can no longer gain clicks
    const index = this._trials.length + 1;
    const lag = nowMs - this.scheduledOnset;
    if (lag > this.jitterToleranceMs) this._annotations.push({ trial: index, lagMs: lag });
    const isi = this.isis[index - 1];
    this._trials.push({
      trial: index,
      block: blockOf(this.spec, index),
      digit: digitAt(this.spec, index),
      onsetMs: nowMs,
      isiMs: isi,
      clicksMs: [],
    });
    const windowEnd =
      nowMs + this.spec.digitDisplayMs + this.spec.responseIntervalMs + isi;
    this.windowEnds.push(windowEnd);
    this._state = "running";
    if (index === this.totalTrials) {
      this.boundaryAt = windowEnd;
      this.boundaryKind = "done";
      this.scheduledOnset = Infinity;
    } else if (index % this.perBlock === 0) {
      this.boundaryAt = windowEnd;
      this.boundaryKind = "rest";
      this.scheduledOnset = Infinity;
    } else {
      this.scheduledOnset = windowEnd;
    }
  }

  private presentPractice(nowMs: number): void {
    const j = this._practiceTrials.length;
    const isi = this.practiceIsis[j];
    this._practiceTrials.push({
      trial: j + 1,
      block: 0,
      digit: this.practiceDigits[j],
      onsetMs: nowMs,
      isiMs: isi,
      clicksMs: [],
    });
    const windowEnd =
      nowMs + this.spec.digitDisplayMs + this.spec.responseIntervalMs + isi;
    this.practiceWindowEnds.push(windowEnd);
    if (j + 1 === this.practiceDigits.length) {
      this.boundaryAt = windowEnd;
      this.boundaryKind = "rest";
      this.scheduledOnset = Infinity;
    } else {
      this.scheduledOnset = windowEnd;
    }
  }

  // Block-final trials stop accepting clicks at their window end (the rest
  // period); other trials accept until the next actual onset, so a click
  // that lands while a late frame is pending still reaches the trial the
  // offline parser would give it to.
  private tryAssign(
    nowMs: number,
    recs: TrialRecord[],
    ends: number[],
    finalizedCount: number,
    closesAtWindowEnd: (index: number) => boolean,
  ): boolean {
    let j = recs.length - 1;
    while (j >= 0 && recs[j].onsetMs > nowMs) j--;
    if (j < 0 || j < finalizedCount) return false;
    if (closesAtWindowEnd(j + 1) && nowMs >= ends[j]) return false;
    insertSorted(recs[j].clicksMs, nowMs);
    return true;
  }
}
