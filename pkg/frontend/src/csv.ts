import Papa from "papaparse";

import type { RunRecord, SummaryRow } from "./types.js";

/** Input fails the artifact contract (missing column/field, bad value). */
export class SchemaError extends Error {}

export const SUMMARY_COLUMNS = [
  "paradigm",
  "architecture",
  "dataset",
  "bits",
  "mode",
  "temperature",
  "mean_test_acc",
  "var_test_acc",
  "mean_train_acc",
  "var_train_acc",
  "n_trials",
] as const;

function num(raw: string, column: string, line: number, source: string): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(`${source}:${line}: column "${column}" is not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

function toRow(raw: Record<string, string>, line: number, source: string): SummaryRow {
  return {
    paradigm: raw.paradigm,
    architecture: raw.architecture,
    dataset: raw.dataset,
    bits: raw.bits === "fp32" ? null : Math.trunc(num(raw.bits, "bits", line, source)),
    mode: raw.mode,
    temperature: raw.temperature === "" ? null : num(raw.temperature, "temperature", line, source),
    mean_test_acc: num(raw.mean_test_acc, "mean_test_acc", line, source),
    var_test_acc: num(raw.var_test_acc, "var_test_acc", line, source),
    mean_train_acc: num(raw.mean_train_acc, "mean_train_acc", line, source),
    var_train_acc: num(raw.var_train_acc, "var_train_acc", line, source),
    n_trials: Math.trunc(num(raw.n_trials, "n_trials", line, source)),
  };
}

/** Parse a harness summary CSV; rejects unknown layouts and empty tables. */
export function parseSummaryCsv(text: string, source: string): SummaryRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const column of SUMMARY_COLUMNS) {
    if (!fields.includes(column)) {
      throw new SchemaError(`${source}: missing column "${column}"`);
    }
  }
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`${source}: ${e.message} (row ${e.row ?? "?"})`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  // +2: one for the header line, one for 1-based numbering
  return parsed.data.map((raw, i) => toRow(raw, i + 2, source));
}

function requireField(obj: Record<string, unknown>, field: string, source: string): unknown {
  if (!(field in obj) || obj[field] === undefined) {
    throw new SchemaError(`${source}: missing field "${field}"`);
  }
  return obj[field];
}

/** Parse one persisted trial record (records/*.json). */
export function parseRunRecord(text: string, source: string): RunRecord {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null) {
    throw new SchemaError(`${source}: expected a JSON object`);
  }
  const record = doc as Record<string, unknown>;
  const config = requireField(record, "config", source) as Record<string, unknown>;
  for (const field of ["architecture", "dataset", "mode", "seed"]) {
    requireField(config, field, source);
  }
  const traces = requireField(record, "traces", source);
  if (!Array.isArray(traces) || traces.length === 0) {
    throw new SchemaError(`${source}: field "traces" must be a nonempty array`);
  }
  for (const [i, t] of traces.entries()) {
    for (const field of ["epoch", "mean_loss"]) {
      const value = (t as Record<string, unknown>)[field];
      if (typeof value !== "number" || !Number.isFinite(value)) {
        throw new SchemaError(`${source}: traces[${i}].${field} must be a finite number`);
      }
    }
  }
  return record as unknown as RunRecord;
}
