/** Live reimplementation of the offline trial scorer. Per trial: a 5-level
 * vigilance score (TVS) from outcome, speed band, and double clicks; per
 * session: a rolling 36-trial cumulative score (CVS) normalized to [0, 1]
 * plus six summary measures. Window sums stay in integers and means use
 * compensated summation so an exported log re-scored offline agrees with the
 * live values to well below 1e-9. */

export const RT_LOWER_DEFAULT_MS = 250;
export const CALIBRATION_TRIALS_DEFAULT = 27;
export const CVS_WINDOW_DEFAULT = 36;
export const MAX_TVS_LEVEL = 4;

export type Outcome =
  | "Hit"
  | "CommissionError"
  | "OmissionError"
  | "CorrectInhibition";

export interface LabeledTrial {
  outcome: Outcome;
  rtMs: number | null; // first click minus onset; clicked trials only
  multiClick: boolean;
}

export interface Thresholds {
  rtLowerMs: number;
  rtUpperMs: number; // Infinity when calibration saw fewer than 2 clicks
}

export interface SummaryMeasures {
  cePct: number;
  oePct: number;
  cvsMean: number;
  cvsVar: number;
  hrtMeanMs: number;
  hrtVar: number;
}

export function labelTrial(
  isTarget: boolean,
  clicksMs: readonly number[],
  onsetMs: number,
): LabeledTrial {
  const clicked = clicksMs.length > 0;
  const rtMs = clicked ? clicksMs[0] - onsetMs : null;
  let outcome: Outcome;
  if (isTarget) outcome = clicked ? "CommissionError" : "CorrectInhibition";
  else outcome = clicked ? "Hit" : "OmissionError";
  return { outcome, rtMs, multiClick: clicksMs.length >= 2 };
}

/** Neumaier-compensated sum; stays within one rounding step of an exactly
 * rounded sum regardless of length. */
export function compensatedSum(values: readonly number[]): number {
  let sum = 0;
  let c = 0;
  for (const v of values) {
    const t = sum + v;
    if (Math.abs(sum) >= Math.abs(v)) c += sum - t + v;
    else c += v - t + sum;
    sum = t;
  }
  return sum + c;
}

export function mean(values: readonly number[]): number {
  return compensatedSum(values) / values.length;
}

export function sampleSd(values: readonly number[], m: number): number {
  const sq = values.map((v) => (v - m) * (v - m));
  return Math.sqrt(compensatedSum(sq) / (values.length - 1));
}

/** Sample SD over mean; NaN when no spread can be formed or the mean is 0. */
export function ratioSdMean(values: readonly number[]): number {
  if (values.length < 2) return NaN;
  const m = mean(values);
  if (m === 0) return NaN;
  return sampleSd(values, m) / m;
}

/** Upper speed bound as mean + 2 sample-SD of the first clicks among the
 * calibration trials, error trials included. The offline scorer refuses
 * sessions with fewer than 2 calibration clicks; the live runner instead
 * degrades to an infinite upper bound so it never interrupts a participant. */
export function adaptiveThresholds(
  calibration: readonly LabeledTrial[],
  rtLowerMs: number = RT_LOWER_DEFAULT_MS,
): Thresholds {
  const rts: number[] = [];
  for (const t of calibration) if (t.rtMs !== null) rts.push(t.rtMs);
  if (rts.length < 2) return { rtLowerMs, rtUpperMs: Infinity };
  const m = mean(rts);
  return { rtLowerMs, rtUpperMs: m + 2 * sampleSd(rts, m) };
}

/** Five-level trial score; the first matching rule wins. Errors score 0,
 * double clicks 1, correct-but-slow 2, correct-but-impulsive 3, in-band hits
 * and correct inhibitions 4. */
export function tvs(trial: LabeledTrial, th: Thresholds): number {
  if (trial.outcome === "CommissionError" || trial.outcome === "OmissionError") {
    return 0;
  }
  if (trial.multiClick) return 1;
  if (trial.outcome === "CorrectInhibition") return MAX_TVS_LEVEL;
  const rt = trial.rtMs as number;
  if (rt > th.rtUpperMs) return 2;
  if (rt < th.rtLowerMs) return 3;
  return MAX_TVS_LEVEL;
}

export interface TrackerOptions {
  calibTrials?: number;
  window?: number;
  rtLowerMs?: number;
}

/** Incremental TVS/CVS over the live trial stream. Thresholds calibrate once
 * the first `calibTrials` trials have been scored in; TVS is then assigned
 * retroactively to those trials and incrementally afterwards, so the trace
 * covers every trial while the live readout stays hidden until calibration
 * completes. */
export class VigilanceTracker {
  readonly calibTrials: number;
  readonly window: number;
  readonly rtLowerMs: number;

  private labeled: LabeledTrial[] = [];
  private tvsLevels: number[] = [];
  private cvsTrace: number[] = [];
  private windowSum = 0;
  private _thresholds: Thresholds | null = null;

  constructor(opts: TrackerOptions = {}) {
    this.calibTrials = opts.calibTrials ?? CALIBRATION_TRIALS_DEFAULT;
    this.window = opts.window ?? CVS_WINDOW_DEFAULT;
    this.rtLowerMs = opts.rtLowerMs ?? RT_LOWER_DEFAULT_MS;
    if (this.calibTrials < 2 || this.window < 1) {
      throw new Error("calibTrials must be >= 2 and window >= 1");
    }
  }

  get calibrated(): boolean {
    return this._thresholds !== null;
  }

  get thresholds(): Thresholds | null {
    return this._thresholds;
  }

  get trialCount(): number {
    return this.labeled.length;
  }

  /** Live CVS readout; null until calibration completes. */
  get liveCvs(): number | null {
    return this.cvsTrace.length > 0 ? this.cvsTrace[this.cvsTrace.length - 1] : null;
  }

  /** Per-trial CVS values, one per scored trial once calibrated. */
  get trace(): readonly number[] {
    return this.cvsTrace;
  }

  get levels(): readonly number[] {
    return this.tvsLevels;
  }

  push(trial: LabeledTrial): void {
    this.labeled.push(trial);
    if (this._thresholds === null) {
      if (this.labeled.length === this.calibTrials) {
        this._thresholds = adaptiveThresholds(this.labeled, this.rtLowerMs);
        for (const t of this.labeled) this.pushLevel(tvs(t, this._thresholds));
      }
    } else {
      this.pushLevel(tvs(trial, this._thresholds));
    }
  }

  private pushLevel(level: number): void {
    const i = this.tvsLevels.length;
    this.tvsLevels.push(level);
    this.windowSum += level;
    if (i >= this.window) this.windowSum -= this.tvsLevels[i - this.window];
    const count = Math.min(i + 1, this.window);
    this.cvsTrace.push(this.windowSum / count / MAX_TVS_LEVEL);
  }

  /** The six session measures over everything scored so far. */
  summary(): SummaryMeasures {
    let nCe = 0;
    let nCi = 0;
    let nOe = 0;
    const hitRts: number[] = [];
    for (const t of this.labeled) {
      if (t.outcome === "CommissionError") nCe++;
      else if (t.outcome === "CorrectInhibition") nCi++;
      else if (t.outcome === "OmissionError") nOe++;
      else hitRts.push(t.rtMs as number);
    }
    const nTarget = nCe + nCi;
    const nNontarget = nOe + hitRts.length;
    if (nTarget === 0 || nNontarget === 0) {
      throw new Error("session must contain both target and non-target trials");
    }
    return {
      cePct: (100 * nCe) / nTarget,
      oePct: (100 * nOe) / nNontarget,
      cvsMean: this.cvsTrace.length > 0 ? mean(this.cvsTrace) : NaN,
      cvsVar: ratioSdMean(this.cvsTrace),
      hrtMeanMs: hitRts.length > 0 ? mean(hitRts) : NaN,
      hrtVar: ratioSdMean(hitRts),
    };
  }
}
