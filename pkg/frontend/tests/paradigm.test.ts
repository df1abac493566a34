import { describe, expect, it } from "vitest";
import {
  DEFAULT_PARADIGM,
  ParadigmSpec,
  blockOf,
  digitAt,
  paradigmJson,
  trialsPerBlock,
  trialsPerSession,
  validateParadigm,
} from "../src/paradigm.js";

describe("paradigm structure", () => {
  it("has 225 trials per block and 2700 per session by default", () => {
    expect(trialsPerBlock(DEFAULT_PARADIGM)).toBe(225);
    expect(trialsPerSession(DEFAULT_PARADIGM)).toBe(2700);
  });

  it("cycles the digits in fixed order", () => {
    for (let trial = 1; trial <= 27; trial++) {
      expect(digitAt(DEFAULT_PARADIGM, trial)).toBe(((trial - 1) % 9) + 1);
    }
  });

  it("shows the target exactly 25 times per block", () => {
    for (const block of [1, 7, 12]) {
      let hits = 0;
      for (let t = (block - 1) * 225 + 1; t <= block * 225; t++) {
        if (digitAt(DEFAULT_PARADIGM, t) === DEFAULT_PARADIGM.targetDigit) hits++;
      }
      expect(hits).toBe(25);
    }
  });

  it("maps trial indices onto 1-based blocks", () => {
    expect(blockOf(DEFAULT_PARADIGM, 1)).toBe(1);
    expect(blockOf(DEFAULT_PARADIGM, 225)).toBe(1);
    expect(blockOf(DEFAULT_PARADIGM, 226)).toBe(2);
    expect(blockOf(DEFAULT_PARADIGM, 2700)).toBe(12);
  });

  it("serializes the header payload in the event-log layout", () => {
    const obj = paradigmJson(DEFAULT_PARADIGM);
    expect(Object.keys(obj)).toEqual([
      "digit_display_ms",
      "response_interval_ms",
      "isi_range_ms",
      "sequences_per_block",
      "blocks",
      "digits",
      "target_digit",
    ]);
    expect(obj.digit_display_ms).toBe(250);
    expect(obj.response_interval_ms).toBe(300);
    expect(obj.isi_range_ms).toEqual([400, 1000]);
    expect(obj.digits).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9]);
    expect(obj.target_digit).toBe(3);
  });

  it("rejects invalid configurations", () => {
    const bad = (patch: Partial<ParadigmSpec>) => () =>
      validateParadigm({ ...DEFAULT_PARADIGM, ...patch });
    expect(bad({ digitDisplayMs: 0 })).toThrow(/positive/);
    expect(bad({ responseIntervalMs: -1 })).toThrow(/positive/);
    expect(bad({ isiRangeMs: [0, 500] })).toThrow(/ISI/);
    expect(bad({ isiRangeMs: [900, 500] })).toThrow(/ISI/);
    expect(bad({ blocks: 0 })).toThrow(/>= 1/);
    expect(bad({ targetDigit: 11 })).toThrow(/target digit/);
  });
});
