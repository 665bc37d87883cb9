#!/usr/bin/env node
/**
 * kerrnet-plots --figure fig4 --in <dir> [--out <dir>]
 *
 * Reads the documented CSV schemas produced by the simulator presets and
 * writes one SVG per figure.  Exit codes: 0 success, 2 invalid input.
 */

import { mkdirSync, writeFileSync } from "fs";
import path from "path";

import { InputError } from "./csv.js";
import { FIGURE_IDS, FigureId, renderFigure } from "./figures.js";

function usage(): string {
  return `usage: kerrnet-plots --figure <${FIGURE_IDS.join("|")}> --in <dir> [--out <dir>]`;
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key.startsWith("--") || val === undefined) {
      console.error(usage());
      return 2;
    }
    args.set(key.slice(2), val);
  }
  const figure = args.get("figure");
  const inDir = args.get("in");
  const outDir = args.get("out") ?? ".";
  if (!figure || !inDir) {
    console.error(usage());
    return 2;
  }
  if (!(FIGURE_IDS as readonly string[]).includes(figure)) {
    console.error(`unknown figure '${figure}'; expected one of ${FIGURE_IDS.join(", ")}`);
    return 2;
  }
  let svg: string;
  try {
    svg = renderFigure(figure as FigureId, inDir);
  } catch (err) {
    if (err instanceof InputError) {
      console.error(`input error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  mkdirSync(outDir, { recursive: true });
  const outPath = path.join(outDir, `${figure}.svg`);
  writeFileSync(outPath, svg, "utf-8");
  console.log(outPath);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
