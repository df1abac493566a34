import { ParadigmSpec, paradigmJson } from "./paradigm.js";

export const SCHEMA_EVENTS = "vigilkit-events/1";

/** One presented digit with the clicks attributed to its window. Onsets are
 * actual presentation times from the display clock. */
export interface TrialRecord {
  trial: number; // 1-based
  block: number; // 1-based; 0 for practice trials, which never export
  digit: number;
  onsetMs: number;
  isiMs: number;
  clicksMs: number[]; // sorted ascending, first >= onset
}

/** JSON Lines event log: one header record, then one record per trial.
 * Key layout matches the offline parser; numbers serialize via the shortest
 * round-trip form, so re-parsing reproduces the exact values. */
export function serializeEventLog(
  participant: string,
  spec: ParadigmSpec,
  trials: readonly TrialRecord[],
): string {
  const lines: string[] = [
    JSON.stringify({
      schema: SCHEMA_EVENTS,
      participant,
      paradigm: paradigmJson(spec),
    }),
  ];
  for (const t of trials) {
    lines.push(
      JSON.stringify({
        trial: t.trial,
        block: t.block,
        digit: t.digit,
        onset_ms: t.onsetMs,
        isi_ms: t.isiMs,
        clicks_ms: t.clicksMs,
      }),
    );
  }
  return lines.join("\n") + "\n";
}
