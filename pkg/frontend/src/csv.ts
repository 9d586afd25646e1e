/**
 * Strict readers for the benchmark CSV formats.
 *
 * Record files carry the fixed header
 * scheme,case,quantity,n_steps,n_paths,estimate,std_error,reference,abs_error,wall_time_ms
 * preceded by `# key=value` metadata comments; sample-path files use
 * scheme,case,path,t,v,u_cum,z_cum. Any header or row deviation raises
 * SchemaError - figures must never be built from half-understood data.
 */

export const RECORD_COLUMNS = [
  "scheme",
  "case",
  "quantity",
  "n_steps",
  "n_paths",
  "estimate",
  "std_error",
  "reference",
  "abs_error",
  "wall_time_ms",
] as const;

export const SAMPLE_PATH_COLUMNS = ["scheme", "case", "path", "t", "v", "u_cum", "z_cum"] as const;

export class SchemaError extends Error {}

export interface ResultRecord {
  scheme: string;
  case: string;
  quantity: string;
  nSteps: number;
  nPaths: number;
  estimate: number;
  stdError: number;
  reference: number;
  absError: number;
  wallTimeMs: number;
}

export interface SamplePathRow {
  scheme: string;
  case: string;
  path: number;
  t: number;
  v: number;
  uCum: number;
  zCum: number;
}

export interface RecordFile {
  seed: number | null;
  records: ResultRecord[];
}

export interface SamplePathFile {
  seed: number | null;
  rows: SamplePathRow[];
}

function splitContent(text: string): { seed: number | null; header: string; rows: string[] } {
  let seed: number | null = null;
  let header: string | null = null;
  const rows: string[] = [];
  for (const raw of text.split("\n")) {
    const line = raw.replace(/\r$/, "");
    if (line === "") continue;
    if (line.startsWith("#")) {
      const m = line.match(/^#\s*seed=(-?\d+)\s*$/);
      if (m) seed = Number(m[1]);
      continue;
    }
    if (header === null) {
      header = line;
    } else {
      rows.push(line);
    }
  }
  if (header === null) throw new SchemaError("CSV has no header row");
  return { seed, header, rows };
}

function parseNumber(field: string, value: string, row: number): number {
  if (value === "nan" || value === "-nan") return NaN;
  const x = Number(value);
  if (value.trim() === "" || Number.isNaN(x)) {
    throw new SchemaError(`row ${row}: field ${field} is not numeric: ${JSON.stringify(value)}`);
  }
  return x;
}

function parseInteger(field: string, value: string, row: number): number {
  const x = parseNumber(field, value, row);
  if (!Number.isInteger(x)) throw new SchemaError(`row ${row}: field ${field} must be an integer`);
  return x;
}

export function parseRecordsCsv(text: string): RecordFile {
  const { seed, header, rows } = splitContent(text);
  if (header !== RECORD_COLUMNS.join(",")) {
    throw new SchemaError(`unexpected record header: ${JSON.stringify(header)}`);
  }
  const records = rows.map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== RECORD_COLUMNS.length) {
      throw new SchemaError(`row ${i + 1}: expected ${RECORD_COLUMNS.length} fields, got ${parts.length}`);
    }
    return {
      scheme: parts[0],
      case: parts[1],
      quantity: parts[2],
      nSteps: parseInteger("n_steps", parts[3], i + 1),
      nPaths: parseInteger("n_paths", parts[4], i + 1),
      estimate: parseNumber("estimate", parts[5], i + 1),
      stdError: parseNumber("std_error", parts[6], i + 1),
      reference: parseNumber("reference", parts[7], i + 1),
      absError: parseNumber("abs_error", parts[8], i + 1),
      wallTimeMs: parseNumber("wall_time_ms", parts[9], i + 1),
    };
  });
  return { seed, records };
}

export function parseSamplePathsCsv(text: string): SamplePathFile {
  const { seed, header, rows } = splitContent(text);
  if (header !== SAMPLE_PATH_COLUMNS.join(",")) {
    throw new SchemaError(`unexpected sample-path header: ${JSON.stringify(header)}`);
  }
  const parsed = rows.map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== SAMPLE_PATH_COLUMNS.length) {
      throw new SchemaError(`row ${i + 1}: expected ${SAMPLE_PATH_COLUMNS.length} fields, got ${parts.length}`);
    }
    return {
      scheme: parts[0],
      case: parts[1],
      path: parseInteger("path", parts[2], i + 1),
      t: parseNumber("t", parts[3], i + 1),
      v: parseNumber("v", parts[4], i + 1),
      uCum: parseNumber("u_cum", parts[5], i + 1),
      zCum: parseNumber("z_cum", parts[6], i + 1),
    };
  });
  return { seed, rows: parsed };
}

export interface RecordFilter {
  case?: string;
  quantity?: string;
  schemes?: string[];
}

export function filterRecords(records: ResultRecord[], filter: RecordFilter): ResultRecord[] {
  const out = records.filter(
    (r) =>
      (filter.case === undefined || r.case === filter.case) &&
      (filter.quantity === undefined || r.quantity === filter.quantity) &&
      (filter.schemes === undefined || filter.schemes.includes(r.scheme)),
  );
  if (out.length === 0) throw new SchemaError("filter matched no records");
  return out;
}
