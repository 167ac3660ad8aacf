/**
 * Figure assembly: resolve the CSV inputs each figure needs from a run
 * directory, validate them fully, then emit one SVG per figure.
 *
 * Inputs are the simulator's own outputs: a sweep directory
 * (summary.csv + g<gamma>_T<T>_s<seed>/series.csv) and, for the
 * wavepacket benchmark figure, wavepacket_free.csv/wavepacket_damped.csv
 * in the same directory. All validation happens before any file is
 * written, so a failure never leaves a partial image behind.
 */

import { existsSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import {
  MissingInputsError,
  SERIES_COLUMNS,
  SUMMARY_COLUMNS,
  Table,
  WAVEPACKET_COLUMNS,
  groupBy,
  readTable,
} from "./csv.js";
import { Line, Panel, renderSvg } from "./figures.js";
import { revivalPairs } from "./revivals.js";

export const FIGURE_IDS = [1, 2, 3, 4, 5] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

interface SweepPoint {
  gamma: number;
  temp: number;
  seed: number;
  dir: string;
  series: Table;
}

interface SweepData {
  summary: Table;
  points: SweepPoint[];
}

function fmtParam(x: number): string {
  // mirrors the runner's %g directory naming for the values that occur
  // in practice (0.01, 0.32, 1, ...)
  return String(x);
}

function pointDirs(inDir: string, summary: Table): Array<Omit<SweepPoint, "series">> {
  // the sweep manifest records exact directory names; fall back to the
  // documented naming scheme when it is absent
  const fromManifest = new Map<string, string>();
  const manifestPath = join(inDir, "manifest.json");
  if (existsSync(manifestPath)) {
    try {
      const doc = JSON.parse(readFileSync(manifestPath, "utf-8"));
      for (const p of doc.points ?? []) {
        if (p.status === "ok") {
          fromManifest.set(`${p.gamma}|${p.temp}|${p.seed}`, p.dir);
        }
      }
    } catch {
      // unreadable manifest: fall back to constructed names
    }
  }
  const out: Array<Omit<SweepPoint, "series">> = [];
  for (let i = 0; i < summary.gamma.length; i++) {
    const gamma = summary.gamma[i];
    const temp = summary.T[i];
    const seed = summary.seed[i];
    const dir = fromManifest.get(`${gamma}|${temp}|${seed}`)
      ?? `g${fmtParam(gamma)}_T${fmtParam(temp)}_s${seed}`;
    out.push({ gamma, temp, seed, dir });
  }
  return out;
}

export function loadSweep(inDir: string): SweepData {
  const summaryPath = join(inDir, "summary.csv");
  if (!existsSync(summaryPath)) {
    throw new MissingInputsError([summaryPath]);
  }
  const summary = readTable(summaryPath, SUMMARY_COLUMNS);
  const dirs = pointDirs(inDir, summary);
  const missing = dirs
    .map((d) => join(inDir, d.dir, "series.csv"))
    .filter((p) => !existsSync(p));
  if (missing.length > 0) {
    throw new MissingInputsError(missing);
  }
  const points = dirs.map((d) => ({
    ...d,
    series: readTable(join(inDir, d.dir, "series.csv"), SERIES_COLUMNS),
  }));
  points.sort((a, b) => a.gamma - b.gamma || a.temp - b.temp || a.seed - b.seed);
  return { summary, points };
}

function loadWavepackets(inDir: string): { free: Table; damped: Table } {
  const freePath = join(inDir, "wavepacket_free.csv");
  const dampedPath = join(inDir, "wavepacket_damped.csv");
  const missing = [freePath, dampedPath].filter((p) => !existsSync(p));
  if (missing.length > 0) {
    throw new MissingInputsError(missing);
  }
  return {
    free: readTable(freePath, WAVEPACKET_COLUMNS),
    damped: readTable(dampedPath, WAVEPACKET_COLUMNS),
  };
}

function label(point: { gamma: number; temp: number }): string {
  return `γ=${fmtParam(point.gamma)}, T=${fmtParam(point.temp)}`;
}

function wavePanel(table: Table, title: string): Panel {
  const lines: Line[] = [];
  let idx = 0;
  for (const [t, rows] of groupBy(table, "t")) {
    lines.push({ name: `t=${t.toFixed(2)}`, x: rows.q, y: rows.p, colorIndex: idx });
    idx += 1;
  }
  return { title, xLabel: "q", yLabel: "|ψ(q)|²", lines };
}

function fig1(inDir: string): Panel[] {
  const { free, damped } = loadWavepackets(inDir);
  return [
    wavePanel(free, "free evolution"),
    wavePanel(damped, "damped evolution"),
  ];
}

function fig2(inDir: string): Panel[] {
  const sweep = loadSweep(inDir);
  const unitTemp = sweep.points.filter((p) => p.temp === 1.0);
  if (unitTemp.length === 0) {
    throw new Error(`no sweep points at T=1 in ${inDir}: figure 2 needs them`);
  }
  const mk = (column: "D_S" | "sqrtJ_S", title: string, yLabel: string): Panel => ({
    title,
    xLabel: "t [1/ω]",
    yLabel,
    lines: unitTemp.map((p, idx) => ({
      name: `γ=${fmtParam(p.gamma)}`,
      x: p.series.t,
      y: p.series[column],
      colorIndex: idx,
    })),
  });
  return [
    mk("D_S", "trace distance, T=1", "D"),
    mk("sqrtJ_S", "√(Jensen-Shannon), T=1", "√J"),
  ];
}

function fig3(inDir: string): Panel[] {
  const sweep = loadSweep(inDir);
  const byTemp = groupBy(sweep.summary, "T");
  const byGamma = groupBy(sweep.summary, "gamma");
  const sortPairs = (x: number[], y: number[]) => {
    const order = x.map((_, i) => i).sort((a, b) => x[a] - x[b]);
    return { x: order.map((i) => x[i]), y: order.map((i) => y[i]) };
  };
  const vsGamma: Line[] = [...byTemp.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([temp, rows], idx) => ({
      name: `T=${fmtParam(temp)}`,
      ...sortPairs(rows.gamma, rows.N_D),
      colorIndex: idx,
    }));
  const vsTemp: Line[] = [...byGamma.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([gamma, rows], idx) => ({
      name: `γ=${fmtParam(gamma)}`,
      ...sortPairs(rows.T, rows.N_D),
      colorIndex: idx,
    }));
  return [
    { title: "backflow measure vs coupling", xLabel: "γ", yLabel: "N", lines: vsGamma },
    { title: "backflow measure vs temperature", xLabel: "T", yLabel: "N",
      lines: vsTemp, xLog: true },
  ];
}

function fig4(inDir: string): Panel[] {
  const sweep = loadSweep(inDir);
  const mk = (column: string, title: string, yLabel: string): Panel => ({
    title,
    xLabel: "t [1/ω]",
    yLabel,
    lines: sweep.points.map((p, idx) => ({
      name: label(p),
      x: p.series.t,
      y: p.series[column],
      colorIndex: idx,
    })),
  });
  return [
    mk("D_corr1", "system-environment correlations (D)", "D(ρ_SE, ρ_S⊗ρ_E)"),
    mk("deltaX", "correlation quantifier gap", "ΔX = √J − D"),
    mk("D_env", "environmental distinguishability (D)", "D(ρ_E¹, ρ_E²)"),
    mk("deltaY", "environment quantifier gap", "ΔY = √J − D"),
  ];
}

function fig5(inDir: string): Panel[] {
  const sweep = loadSweep(inDir);
  const mk = (distColumn: string, rhsColumn: string, title: string): Panel => {
    const lines: Line[] = [];
    sweep.points.forEach((p, idx) => {
      lines.push({
        name: `${label(p)} bound`,
        x: p.series.t,
        y: p.series[rhsColumn],
        colorIndex: idx,
      });
      const pairs = revivalPairs(p.series[distColumn]);
      lines.push({
        name: `${label(p)} revival`,
        x: pairs.map((pr) => p.series.t[pr.s]),
        y: pairs.map((pr) => pr.delta),
        dashed: true,
        colorIndex: idx,
      });
    });
    return { title, xLabel: "s [1/ω]", yLabel: "bound / revival", lines };
  };
  return [
    mk("D_S", "D_bound_rhs", "trace distance"),
    mk("sqrtJ_S", "sqrtJ_bound_rhs", "√(Jensen-Shannon)"),
  ];
}

const BUILDERS: Record<FigureId, { build: (inDir: string) => Panel[]; columns: number }> = {
  1: { build: fig1, columns: 2 },
  2: { build: fig2, columns: 2 },
  3: { build: fig3, columns: 2 },
  4: { build: fig4, columns: 2 },
  5: { build: fig5, columns: 2 },
};

export function renderFigures(figs: FigureId[], inDir: string, outDir: string): string[] {
  // build everything first: an invalid input must not leave partial output
  const rendered = figs.map((fig) => {
    const { build, columns } = BUILDERS[fig];
    return { fig, svg: renderSvg(build(inDir), columns) };
  });
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const { fig, svg } of rendered) {
    const path = join(outDir, `fig${fig}.svg`);
    writeFileSync(path, svg, "utf-8");
    written.push(path);
  }
  return written;
}

export function parseFigArg(arg: string): FigureId[] {
  if (arg === "all") {
    return [...FIGURE_IDS];
  }
  const fig = Number(arg);
  if (!FIGURE_IDS.includes(fig as FigureId)) {
    throw new Error(`--fig must be one of 1..5 or "all", got ${arg}`);
  }
  return [fig as FigureId];
}
