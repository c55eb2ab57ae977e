/** Readers for the experiment artifact files (CSV + JSON summaries). */

import { readFileSync } from "node:fs";

export interface RecordRow {
  runId: string;
  time: number;
  normName: string;
  value: number;
}

export interface DecayRow {
  mu: number;
  N: number;
  t: number;
  Nt: number;
  supNorm: number;
  h: number;
}

export class InputError extends Error {}

function splitCsv(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0)
    .map((line) => line.split(",").map((cell) => cell.trim()));
}

function requireColumns(header: string[], needed: string[], path: string): number[] {
  const indices = needed.map((name) => header.indexOf(name));
  const missing = needed.filter((_, i) => indices[i] < 0);
  if (missing.length > 0) {
    throw new InputError(`${path}: missing column(s) ${missing.join(", ")}`);
  }
  return indices;
}

function parseNumber(cell: string, path: string, line: number): number {
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new InputError(`${path}:${line}: not a number: ${JSON.stringify(cell)}`);
  }
  return v;
}

/** records.csv: run_id,time,norm_name,value */
export function readRecords(path: string): RecordRow[] {
  const rows = splitCsv(readFileSync(path, "utf8"));
  if (rows.length === 0) throw new InputError(`${path}: empty file`);
  const [iRun, iTime, iName, iValue] = requireColumns(
    rows[0],
    ["run_id", "time", "norm_name", "value"],
    path,
  );
  const out: RecordRow[] = [];
  for (let k = 1; k < rows.length; k++) {
    out.push({
      runId: rows[k][iRun],
      time: parseNumber(rows[k][iTime], path, k + 1),
      normName: rows[k][iName],
      value: parseNumber(rows[k][iValue], path, k + 1),
    });
  }
  if (out.length === 0) throw new InputError(`${path}: no data rows`);
  return out;
}

/** decay.csv: mu,N,t,Nt,sup_norm,h */
export function readDecay(path: string): DecayRow[] {
  const rows = splitCsv(readFileSync(path, "utf8"));
  if (rows.length === 0) throw new InputError(`${path}: empty file`);
  const idx = requireColumns(rows[0], ["mu", "N", "t", "Nt", "sup_norm", "h"], path);
  const out: DecayRow[] = [];
  for (let k = 1; k < rows.length; k++) {
    const nums = idx.map((i) => parseNumber(rows[k][i], path, k + 1));
    out.push({ mu: nums[0], N: nums[1], t: nums[2], Nt: nums[3], supNorm: nums[4], h: nums[5] });
  }
  if (out.length === 0) throw new InputError(`${path}: no data rows`);
  return out;
}

export function readJson(path: string): any {
  try {
    return JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new InputError(`${path}: ${(err as Error).message}`);
  }
}
