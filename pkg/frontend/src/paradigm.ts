/** Timing and structure of the fixed-sequence, varying-ISI go/no-go task.
 * Mirrors the offline toolkit's paradigm header so exported logs parse
 * there unchanged. */
export interface ParadigmSpec {
  digitDisplayMs: number;
  responseIntervalMs: number;
  isiRangeMs: [number, number];
  sequencesPerBlock: number;
  blocks: number;
  digits: number[];
  targetDigit: number;
}

export const DEFAULT_PARADIGM: ParadigmSpec = {
  digitDisplayMs: 250,
  responseIntervalMs: 300,
  isiRangeMs: [400, 1000],
  sequencesPerBlock: 25,
  blocks: 12,
  digits: [1, 2, 3, 4, 5, 6, 7, 8, 9],
  targetDigit: 3,
};

export function validateParadigm(spec: ParadigmSpec): void {
  if (spec.digitDisplayMs <= 0 || spec.responseIntervalMs <= 0) {
    throw new Error("durations must be positive");
  }
  const [lo, hi] = spec.isiRangeMs;
  if (!(lo > 0 && lo <= hi)) throw new Error(`bad ISI range [${lo}, ${hi}]`);
  if (spec.sequencesPerBlock < 1 || spec.blocks < 1) {
    throw new Error("counts must be >= 1");
  }
  if (!spec.digits.includes(spec.targetDigit)) {
    throw new Error(`target digit ${spec.targetDigit} not in digit set`);
  }
}

export function trialsPerBlock(spec: ParadigmSpec): number {
  return spec.sequencesPerBlock * spec.digits.length;
}

export function trialsPerSession(spec: ParadigmSpec): number {
  return trialsPerBlock(spec) * spec.blocks;
}

/** Digit shown on a 1-based trial index; the order is fixed within every
 * sequence. */
export function digitAt(spec: ParadigmSpec, trialIndex: number): number {
  return spec.digits[(trialIndex - 1) % spec.digits.length];
}

/** 1-based block containing a 1-based trial index. */
export function blockOf(spec: ParadigmSpec, trialIndex: number): number {
  return Math.floor((trialIndex - 1) / trialsPerBlock(spec)) + 1;
}

/** Header payload in the event-log key layout. */
export function paradigmJson(spec: ParadigmSpec): Record<string, unknown> {
  return {
    digit_display_ms: spec.digitDisplayMs,
    response_interval_ms: spec.responseIntervalMs,
    isi_range_ms: [spec.isiRangeMs[0], spec.isiRangeMs[1]],
    sequences_per_block: spec.sequencesPerBlock,
    blocks: spec.blocks,
    digits: [...spec.digits],
    target_digit: spec.targetDigit,
  };
}
