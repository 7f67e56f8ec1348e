/**
 * Minimal numeric-CSV reading for the simulator's output streams.
 * Every file is a header row of column names followed by float rows.
 */

import { readFileSync } from "fs";

export class InputError extends Error {}

export interface Table {
  columns: string[];
  rows: number[][];
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new InputError(`${path}: empty CSV`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new InputError(`${path}:${i + 1}: expected ${columns.length} fields, got ${parts.length}`);
    }
    const row = parts.map(Number);
    if (row.some((v) => Number.isNaN(v))) {
      throw new InputError(`${path}:${i + 1}: non-numeric field`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new InputError(`${path}: no data rows`);
  }
  return { columns, rows };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new InputError(`${path}: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

/** Extract one column by name; missing names are input errors. */
export function column(table: Table, name: string, path = "<table>"): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new InputError(`${path}: missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}

export function requireColumns(table: Table, names: string[], path = "<table>"): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new InputError(`${path}: missing column '${name}' (have: ${table.columns.join(", ")})`);
    }
  }
}
