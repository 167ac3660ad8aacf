import { existsSync, mkdirSync, mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { MissingColumnsError, MissingInputsError, SERIES_COLUMNS } from "../src/csv.js";
import { parseFigArg, renderFigures } from "../src/render.js";

const SUMMARY_HEADER = "gamma,T,seed,N_D,N_sqrtJ,D_S_t0,max_revival_D";

function seriesCsv(scale: number): string {
  // a decaying series with two genuine revivals so figure 5 has pairs
  const dS = [0.99, 0.8, 0.6, 0.7, 0.5, 0.42, 0.47, 0.3, 0.2, 0.12, 0.05];
  const lines = [SERIES_COLUMNS.join(",")];
  dS.forEach((d, k) => {
    const t = 0.05 * k;
    const corr = scale * (1 - Math.exp(-t));
    const env = 0.5 * corr;
    const row = [
      t, d, d * 1.01, corr, corr * 1.02, corr * 1.05, corr * 1.06,
      env, env * 1.04, 2.02 * corr + env, 2.11 * corr + 1.04 * env,
      0.01 * k, 0.011 * k, corr * 0.05, env * 0.04,
    ];
    lines.push(row.join(","));
  });
  return lines.join("\n") + "\n";
}

function wavepacketCsv(): string {
  const lines = ["t,q,p"];
  for (const t of [0, 1.5707963267948966]) {
    for (let i = 0; i <= 40; i++) {
      const q = -4 + 0.2 * i;
      const centre = Math.sqrt(2) * Math.cos(t);
      lines.push(`${t},${q},${Math.exp(-((q - centre) ** 2)) / Math.sqrt(Math.PI)}`);
    }
  }
  return lines.join("\n") + "\n";
}

function makeInputDir(): string {
  const dir = mkdtempSync(join(tmpdir(), "aclsim-render-"));
  const points = [
    { gamma: 0.32, temp: 1, seed: 42, nm: 0.4, revival: 0.1 },
    { gamma: 0.55, temp: 1, seed: 42, nm: 0.6, revival: 0.15 },
    { gamma: 0.55, temp: 0.1, seed: 42, nm: 0.7, revival: 0.2 },
  ];
  const rows = points.map((p) =>
    `${p.gamma},${p.temp},${p.seed},${p.nm},${p.nm * 1.05},0.99,${p.revival}`);
  writeFileSync(join(dir, "summary.csv"), [SUMMARY_HEADER, ...rows].join("\n") + "\n");
  points.forEach((p, i) => {
    const sub = join(dir, `g${p.gamma}_T${p.temp}_s${p.seed}`);
    mkdirSync(sub);
    writeFileSync(join(sub, "series.csv"), seriesCsv(0.3 + 0.1 * i));
  });
  writeFileSync(join(dir, "wavepacket_free.csv"), wavepacketCsv());
  writeFileSync(join(dir, "wavepacket_damped.csv"), wavepacketCsv());
  return dir;
}

describe("parseFigArg", () => {
  it("expands all", () => {
    expect(parseFigArg("all")).toEqual([1, 2, 3, 4, 5]);
  });
  it("accepts single ids", () => {
    expect(parseFigArg("3")).toEqual([3]);
  });
  it("rejects out-of-range ids", () => {
    expect(() => parseFigArg("7")).toThrow(/1\.\.5/);
  });
});

describe("renderFigures", () => {
  it("renders all five figures as SVG", () => {
    const inDir = makeInputDir();
    const outDir = join(inDir, "figures");
    const written = renderFigures([1, 2, 3, 4, 5], inDir, outDir);
    expect(written).toHaveLength(5);
    for (const path of written) {
      const content = readFileSync(path, "utf-8");
      expect(content.startsWith("<svg")).toBe(true);
      expect(content.length).toBeGreaterThan(2000);
    }
  });

  it("is deterministic for identical inputs", () => {
    const inDir = makeInputDir();
    const a = renderFigures([3], inDir, join(inDir, "a"))[0];
    const b = renderFigures([3], inDir, join(inDir, "b"))[0];
    expect(readFileSync(a, "utf-8")).toEqual(readFileSync(b, "utf-8"));
  });

  it("lists missing inputs and writes nothing", () => {
    const inDir = makeInputDir();
    rmSync(join(inDir, "g0.55_T1_s42", "series.csv"));
    const outDir = join(inDir, "figures");
    try {
      renderFigures([2], inDir, outDir);
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(MissingInputsError);
      expect((err as MissingInputsError).message).toContain("g0.55_T1_s42");
    }
    expect(existsSync(outDir)).toBe(false);
  });

  it("reports an empty input directory as missing inputs", () => {
    const empty = mkdtempSync(join(tmpdir(), "aclsim-empty-"));
    expect(() => renderFigures([4], empty, join(empty, "figs")))
      .toThrow(MissingInputsError);
    expect(existsSync(join(empty, "figs"))).toBe(false);
  });

  it("names a deleted column and writes nothing", () => {
    const inDir = makeInputDir();
    const victim = join(inDir, "g0.32_T1_s42", "series.csv");
    const lines = readFileSync(victim, "utf-8").trim().split("\n");
    const cut = lines.map((line) => line.split(",").slice(0, -1).join(","));
    writeFileSync(victim, cut.join("\n") + "\n");
    const outDir = join(inDir, "figures");
    try {
      renderFigures([4], inDir, outDir);
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnsError);
      expect((err as MissingColumnsError).message).toContain("deltaY");
    }
    expect(existsSync(outDir)).toBe(false);
  });

  it("fails figure 2 when no unit-temperature points exist", () => {
    const inDir = makeInputDir();
    const summary = join(inDir, "summary.csv");
    writeFileSync(summary, [
      SUMMARY_HEADER,
      "0.55,0.1,42,0.7,0.74,0.99,0.2",
    ].join("\n") + "\n");
    expect(() => renderFigures([2], inDir, join(inDir, "figs"))).toThrow(/T=1/);
  });

  it("only writes the requested figure", () => {
    const inDir = makeInputDir();
    const outDir = join(inDir, "figures");
    renderFigures([3], inDir, outDir);
    expect(readdirSync(outDir)).toEqual(["fig3.svg"]);
  });
});
