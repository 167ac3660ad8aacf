#!/usr/bin/env node
/** CLI: render figure analogues from simulator output CSVs. */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parseFigArg, renderFigures } from "./render.js";

yargs(hideBin(process.argv))
  .command(
    "render",
    "render static SVG figures from a completed run directory",
    (y) =>
      y
        .option("fig", {
          type: "string",
          demandOption: true,
          describe: 'figure to render: 1..5 or "all"',
        })
        .option("in", {
          type: "string",
          demandOption: true,
          describe: "input directory (sweep output; wavepacket CSVs for --fig 1)",
        })
        .option("out", {
          type: "string",
          demandOption: true,
          describe: "output directory for the SVG files",
        }),
    (argv) => {
      try {
        const figs = parseFigArg(argv.fig);
        const written = renderFigures(figs, argv.in, argv.out);
        for (const path of written) {
          console.log(`wrote ${path}`);
        }
      } catch (err) {
        console.error(err instanceof Error ? err.message : String(err));
        process.exitCode = 1;
      }
    },
  )
  .demandCommand(1, 'specify the "render" command')
  .strict()
  .help()
  .parse();
