/**
 * CSV + metadata sidecar loading for kerrnet outputs.
 *
 * Every data file `X.csv` ships with `X.meta.json` carrying the schema
 * version, the column list and the resolved run configuration.  Loading
 * validates both before any rendering happens, so a bad input never
 * produces a partial image.
 */

import { readFileSync } from "fs";
import path from "path";

export const SCHEMA_VERSION = 1;

export interface Table {
  /** CSV file name (for error messages). */
  name: string;
  columns: string[];
  /** Row-major numeric data, one array per row. */
  rows: number[][];
  /** Parsed sidecar metadata. */
  meta: { schema_version: number; columns: string[]; config: unknown };
}

export class InputError extends Error {}

export function parseCsv(name: string, text: string): { columns: string[]; rows: number[][] } {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new InputError(`${name}: empty CSV`);
  }
  const columns = lines[0].split(",");
  if (columns.some((c) => c.length === 0 || /^[-+0-9.]/.test(c))) {
    throw new InputError(`${name}: malformed header '${lines[0]}'`);
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new InputError(
        `${name}:${i + 1}: expected ${columns.length} fields, found ${parts.length}`,
      );
    }
    const row = parts.map(Number);
    if (row.some((v) => Number.isNaN(v))) {
      throw new InputError(`${name}:${i + 1}: non-numeric field in '${lines[i]}'`);
    }
    rows.push(row);
  }
  return { columns, rows };
}

export function loadTable(dir: string, fileName: string): Table {
  const csvPath = path.join(dir, fileName);
  let text: string;
  try {
    text = readFileSync(csvPath, "utf-8");
  } catch {
    throw new InputError(`missing input file ${csvPath}`);
  }
  const metaPath = path.join(dir, fileName.replace(/\.csv$/, ".meta.json"));
  let meta: Table["meta"];
  try {
    meta = JSON.parse(readFileSync(metaPath, "utf-8"));
  } catch {
    throw new InputError(`missing or unreadable sidecar ${metaPath}`);
  }
  if (meta.schema_version !== SCHEMA_VERSION) {
    throw new InputError(
      `${metaPath}: schema_version ${meta.schema_version} != expected ${SCHEMA_VERSION}`,
    );
  }
  const { columns, rows } = parseCsv(fileName, text);
  if (JSON.stringify(meta.columns) !== JSON.stringify(columns)) {
    throw new InputError(`${fileName}: header disagrees with sidecar column list`);
  }
  return { name: fileName, columns, rows, meta };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new InputError(`${table.name}: required column '${name}' not found`);
  }
  return table.rows.map((r) => r[idx]);
}
