/**
 * Strict CSV loading for the simulator's output files.
 *
 * Every figure kind expects an exact header; anything else is a schema
 * mismatch and the caller exits nonzero. Values arrive as strings and are
 * converted here; "nan" cells become NaN, booleans are "true"/"false".
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaMismatchError extends Error {}

export interface Table {
  header: string[];
  rows: string[][];
}

export function loadCsv(path: string, expectedHeader: string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new Error(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<string[]>(text.trimEnd(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaMismatchError(`${path}: ${parsed.errors[0].message}`);
  }
  const data = parsed.data;
  if (data.length === 0) {
    throw new SchemaMismatchError(`${path}: empty file, expected a header row`);
  }
  const header = data[0];
  if (header.length !== expectedHeader.length || !header.every((h, i) => h === expectedHeader[i])) {
    throw new SchemaMismatchError(
      `${path}: header [${header.join(",")}] does not match expected [${expectedHeader.join(",")}]`,
    );
  }
  const rows = data.slice(1);
  for (const row of rows) {
    if (row.length !== expectedHeader.length) {
      throw new SchemaMismatchError(`${path}: row with ${row.length} cells, expected ${expectedHeader.length}`);
    }
  }
  return { header, rows };
}

export function num(cell: string): number {
  if (cell === "nan" || cell === "") return NaN;
  const v = Number(cell);
  if (Number.isNaN(v) && cell !== "nan") {
    throw new SchemaMismatchError(`cell ${JSON.stringify(cell)} is not numeric`);
  }
  return v;
}

export function column(table: Table, index: number): number[] {
  return table.rows.map((r) => num(r[index]));
}
