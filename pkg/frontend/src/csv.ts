/**
 * CSV loading for the simulator's output schemas.
 *
 * Every reader validates the expected header up front and fails with an
 * error naming the offending file and columns; values parse to numbers
 * with "nan" mapping to NaN.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const SERIES_COLUMNS = [
  "t", "D_S", "sqrtJ_S", "D_corr1", "D_corr2", "sqrtJ_corr1", "sqrtJ_corr2",
  "D_env", "sqrtJ_env", "D_bound_rhs", "sqrtJ_bound_rhs", "D_Iext", "sqrtJ_Iext",
  "deltaX", "deltaY",
] as const;

export const SUMMARY_COLUMNS = [
  "gamma", "T", "seed", "N_D", "N_sqrtJ", "D_S_t0", "max_revival_D",
] as const;

export const WAVEPACKET_COLUMNS = ["t", "q", "p"] as const;

export type Table = Record<string, number[]>;

export class MissingColumnsError extends Error {
  constructor(public file: string, public columns: string[]) {
    super(`${file}: missing required column(s): ${columns.join(", ")}`);
    this.name = "MissingColumnsError";
  }
}

export class MissingInputsError extends Error {
  constructor(public paths: string[]) {
    super(`missing required input file(s):\n  ${paths.join("\n  ")}`);
    this.name = "MissingInputsError";
  }
}

export function readTable(file: string, required: readonly string[]): Table {
  const text = readFileSync(file, "utf-8");
  const parsed = Papa.parse<Record<string, string | number>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${file}: CSV parse error: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new MissingColumnsError(file, missing);
  }
  const table: Table = {};
  for (const name of fields) {
    table[name] = parsed.data.map((row) => Number(row[name]));
  }
  return table;
}

/** Rows of a table grouped by a key column (insertion-ordered). */
export function groupBy(table: Table, key: string): Map<number, Table> {
  const out = new Map<number, Table>();
  const n = table[key].length;
  const columns = Object.keys(table);
  for (let i = 0; i < n; i++) {
    const k = table[key][i];
    if (!out.has(k)) {
      out.set(k, Object.fromEntries(columns.map((c) => [c, [] as number[]])));
    }
    const bucket = out.get(k)!;
    for (const c of columns) {
      bucket[c].push(table[c][i]);
    }
  }
  return out;
}
