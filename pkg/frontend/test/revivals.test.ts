import { describe, expect, it } from "vitest";

import { revivalPairs } from "../src/revivals.js";

describe("revivalPairs", () => {
  it("returns nothing for a strictly decreasing series", () => {
    expect(revivalPairs([1.0, 0.8, 0.5, 0.2])).toEqual([]);
  });

  it("pairs each index with the nearest later maximum", () => {
    const pairs = revivalPairs([0.9, 0.5, 0.8, 0.3]);
    expect(pairs.map((p) => [p.s, p.t])).toEqual([[0, 2], [1, 2]]);
    expect(pairs[1].delta).toBeCloseTo(0.3, 12);
  });

  it("represents a plateau by its earliest index", () => {
    const pairs = revivalPairs([0.0, 1.0, 1.0, 0.5]);
    expect(pairs.map((p) => [p.s, p.t])).toEqual([[0, 1]]);
  });

  it("ignores shelves on an ascending staircase", () => {
    const pairs = revivalPairs([0.0, 1.0, 1.0, 2.0, 0.0]);
    expect(pairs.map((p) => [p.s, p.t])).toEqual([[0, 3], [1, 3], [2, 3]]);
  });

  it("emits negative deltas when s sits above the next maximum", () => {
    const pairs = revivalPairs([0.9, 0.5, 0.8, 0.3]);
    expect(pairs[0].delta).toBeCloseTo(-0.1, 12);
  });

  it("rejects too-short series", () => {
    expect(() => revivalPairs([1.0, 0.5])).toThrow(/at least 3/);
  });
});
