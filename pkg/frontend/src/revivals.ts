/**
 * Revival pairing of a distinguishability series: each grid index s is
 * matched with the nearest later local maximum t, yielding the
 * distinguishability change delta = series[t] - series[s].
 *
 * A maximal flat run (ties at tieTol) counts as one candidate maximum,
 * represented by its earliest index; it qualifies iff the series rises
 * strictly into the run and drops strictly after it. Mirrors the
 * simulator's own pairing so the rendered bound figure matches the
 * numbers the acceptance suite checks.
 */

export interface RevivalPair {
  s: number;
  t: number;
  delta: number;
}

export function revivalPairs(series: number[], tieTol = 1e-12): RevivalPair[] {
  const n = series.length;
  if (n < 3) {
    throw new Error(`series must have at least 3 points, got ${n}`);
  }
  const maxima: number[] = [];
  let i = 0;
  while (i < n) {
    let j = i;
    while (j + 1 < n && Math.abs(series[j + 1] - series[i]) <= tieTol) {
      j += 1;
    }
    if (i > 0 && j < n - 1
        && series[i - 1] < series[i] - tieTol
        && series[j + 1] < series[j] - tieTol) {
      maxima.push(i);
    }
    i = j + 1;
  }
  const pairs: RevivalPair[] = [];
  let cursor = 0;
  for (let s = 0; s < n; s++) {
    while (cursor < maxima.length && maxima[cursor] <= s) {
      cursor += 1;
    }
    if (cursor === maxima.length) {
      break;
    }
    const t = maxima[cursor];
    pairs.push({ s, t, delta: series[t] - series[s] });
  }
  return pairs;
}
