/**
 * plot <kind> --csv <path> --out <path> [--case N] [--quantity Q] [--schemes a,b]
 *
 * Kinds: convergence | smile | paths | samplepaths. Reads the benchmark CSV
 * schema, writes a deterministic SVG. Exit codes: 0 success, 1 usage error,
 * 2 schema/data error.
 */
import { readFileSync, writeFileSync } from "node:fs";

import { filterRecords, parseRecordsCsv, parseSamplePathsCsv, RecordFilter, SchemaError } from "./csv.js";
import { renderConvergence } from "./convergence.js";
import { renderPaths } from "./paths.js";
import { renderSamplePaths } from "./samplepaths.js";
import { renderSmile } from "./smile.js";

const KINDS = ["convergence", "smile", "paths", "samplepaths"] as const;
type Kind = (typeof KINDS)[number];

export class UsageError extends Error {}

interface Options {
  kind: Kind;
  csv: string;
  out: string;
  filter: RecordFilter;
  title?: string;
}

export function parseArgs(argv: string[]): Options {
  if (argv.length === 0) throw new UsageError(`usage: plot <${KINDS.join("|")}> --csv <path> --out <path>`);
  const kind = argv[0] as Kind;
  if (!KINDS.includes(kind)) throw new UsageError(`unknown figure kind ${JSON.stringify(argv[0])}`);
  let csv: string | undefined;
  let out: string | undefined;
  const filter: RecordFilter = {};
  let title: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new UsageError(`flag ${flag} needs a value`);
    switch (flag) {
      case "--csv":
        csv = value;
        break;
      case "--out":
        out = value;
        break;
      case "--case":
        filter.case = value;
        break;
      case "--quantity":
        filter.quantity = value;
        break;
      case "--schemes":
        filter.schemes = value.split(",").filter((s) => s !== "");
        break;
      case "--title":
        title = value;
        break;
      default:
        throw new UsageError(`unknown flag ${JSON.stringify(flag)}`);
    }
  }
  if (!csv || !out) throw new UsageError("--csv and --out are required");
  return { kind, csv, out, filter, title };
}

export function renderFromFile(opts: Options): string {
  const text = readFileSync(opts.csv, "utf-8");
  if (opts.kind === "samplepaths") {
    let rows = parseSamplePathsCsv(text).rows;
    if (opts.filter.case !== undefined) rows = rows.filter((r) => r.case === opts.filter.case);
    if (opts.filter.schemes !== undefined) rows = rows.filter((r) => opts.filter.schemes!.includes(r.scheme));
    if (rows.length === 0) throw new SchemaError("filter matched no rows");
    const title = opts.title ?? `sample paths (case ${rows[0].case}, ${rows[0].scheme})`;
    return renderSamplePaths(rows, title);
  }
  const file = parseRecordsCsv(text);
  const records = filterRecords(file.records, opts.filter);
  const caseLabel = records[0].case;
  const seedNote = file.seed === null ? "" : `, seed ${file.seed}`;
  if (opts.kind === "convergence") {
    return renderConvergence(records, opts.title ?? `error vs time steps (case ${caseLabel}${seedNote})`);
  }
  if (opts.kind === "smile") {
    return renderSmile(records, opts.title ?? `implied volatility slice (case ${caseLabel}${seedNote})`);
  }
  return renderPaths(records, opts.title ?? `estimate vs path count (case ${caseLabel}${seedNote})`);
}

export function run(argv: string[]): number {
  try {
    const opts = parseArgs(argv);
    const svg = renderFromFile(opts);
    writeFileSync(opts.out, svg, "utf-8");
    console.error(`wrote ${opts.out}`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(String(err.message));
      return 1;
    }
    if (err instanceof SchemaError) {
      console.error(`invalid input: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err && (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(String(err.message));
      return 2;
    }
    throw err;
  }
}

const invokedDirectly = process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
