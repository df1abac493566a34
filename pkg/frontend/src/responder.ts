import { RunnerSession, insertSorted } from "./engine.js";
import { mulberry32, uniform } from "./rng.js";

/** Per-trial behavior rates for the scripted responder. */
export interface ResponderProfile {
  omissionRate?: number;
  commissionRate?: number;
  doubleClickRate?: number;
  slowRate?: number;
  impulsiveRate?: number;
}

interface ResolvedProfile {
  omissionRate: number;
  commissionRate: number;
  doubleClickRate: number;
  slowRate: number;
  impulsiveRate: number;
}

const DEFAULT_PROFILE: ResolvedProfile = {
  omissionRate: 0.05,
  commissionRate: 0.1,
  doubleClickRate: 0.05,
  slowRate: 0.07,
  impulsiveRate: 0.07,
};

// Planned response times sit well inside their speed bands (in-band around
// 300-360 ms, slow 600-700 ms, impulsive 120-180 ms) so live and offline
// threshold comparisons cannot disagree over float rounding.
function planClicks(
  rng: () => number,
  p: ResolvedProfile,
  onsetMs: number,
  isTarget: boolean,
): number[] {
  if (isTarget) {
    return rng() < p.commissionRate ? [onsetMs + uniform(rng, 280, 330)] : [];
  }
  const r = rng();
  if (r < p.omissionRate) return [];
  if (r < p.omissionRate + p.slowRate) return [onsetMs + uniform(rng, 600, 700)];
  if (r < p.omissionRate + p.slowRate + p.impulsiveRate) {
    return [onsetMs + uniform(rng, 120, 180)];
  }
  const rt = uniform(rng, 300, 360);
  const clicks = [onsetMs + rt];
  if (rng() < p.doubleClickRate) clicks.push(onsetMs + rt + 80);
  return clicks;
}

/** Drives a session to completion with a seeded synthetic click schedule.
 * Ticks land exactly on the scheduled instants, so two runs with the same
 * configuration produce byte-identical exports. */
export function runScriptedSession(
  session: RunnerSession,
  seed: number,
  profile: ResponderProfile = {},
  startMs = 1000,
): void {
  const p: ResolvedProfile = { ...DEFAULT_PROFILE, ...profile };
  const rng = mulberry32(seed);
  const pending: number[] = [];
  let plannedPractice = 0;
  let planned = 0;

  session.start(startMs);
  const maxSteps = 10 * session.totalTrials + 1000;
  for (let step = 0; step < maxSteps; step++) {
    while (plannedPractice < session.practiceTrials.length) {
      const rec = session.practiceTrials[plannedPractice++];
      // respond in band to practice digits; these never export
      if (rec.digit !== session.spec.targetDigit) {
        insertSorted(pending, rec.onsetMs + uniform(rng, 300, 360));
      }
    }
    while (planned < session.trials.length) {
      const rec = session.trials[planned++];
      const clicks = planClicks(
        rng,
        p,
        rec.onsetMs,
        rec.digit === session.spec.targetDigit,
      );
      for (const c of clicks) insertSorted(pending, c);
    }
    const due = session.nextDueAt();
    while (pending.length > 0 && pending[0] < due) {
      session.click(pending.shift() as number);
    }
    if (!Number.isFinite(due)) break;
    session.tick(due);
    if (session.state === "done") break;
  }
  if (session.state !== "done") {
    throw new Error("scripted session did not finish");
  }
}
