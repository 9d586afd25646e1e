/**
 * Estimate-vs-path-count stability figure at a fixed step count: one line per
 * scheme, the analytical reference as a horizontal rule, per-point 3-SE bars.
 */
import { ResultRecord, SchemaError } from "./csv.js";
import { drawFrame, drawLegend, linearScale, logScale, schemeColor, SvgBuilder } from "./svg.js";

export function renderPaths(records: ResultRecord[], title: string): string {
  const rows = records.filter((r) => r.scheme !== "reference");
  if (rows.length === 0) throw new SchemaError("no simulation records to plot");
  const quantities = [...new Set(rows.map((r) => r.quantity))];
  if (quantities.length !== 1) {
    throw new SchemaError(`paths figure needs exactly one quantity, got ${quantities.join(", ")}`);
  }
  const schemes = [...new Set(rows.map((r) => r.scheme))].sort();

  const width = 560;
  const height = 330;
  const margin = { left: 74, right: 18, top: 44, bottom: 48 };
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 20, title, { anchor: "middle", size: 14 });

  const frame = { x0: margin.left, y0: margin.top, x1: width - margin.right, y1: height - margin.bottom };
  const counts = rows.map((r) => r.nPaths);
  const values: number[] = [];
  for (const r of rows) {
    if (Number.isFinite(r.estimate)) {
      values.push(r.estimate - 3 * r.stdError, r.estimate + 3 * r.stdError);
    }
    if (Number.isFinite(r.reference)) values.push(r.reference);
  }
  if (values.length === 0) throw new SchemaError("no finite estimates");
  const pad = 0.1 * (Math.max(...values) - Math.min(...values) || 1e-6);
  const xScale = logScale(Math.min(...counts), Math.max(...counts), frame.x0 + 12, frame.x1 - 12);
  const yScale = linearScale(Math.min(...values) - pad, Math.max(...values) + pad, frame.y1 - 8, frame.y0 + 8);
  drawFrame(svg, frame, xScale, yScale, "sample paths", quantities[0]);

  const ref = rows.find((r) => Number.isFinite(r.reference));
  if (ref) svg.line(frame.x0, yScale(ref.reference), frame.x1, yScale(ref.reference), "#000000", 1, "5,3");

  for (const scheme of schemes) {
    const line = rows.filter((r) => r.scheme === scheme).sort((a, b) => a.nPaths - b.nPaths);
    const pts: Array<[number, number]> = [];
    for (const r of line) {
      if (!Number.isFinite(r.estimate)) continue;
      const px = xScale(r.nPaths);
      pts.push([px, yScale(r.estimate)]);
      svg.line(px, yScale(r.estimate - 3 * r.stdError), px, yScale(r.estimate + 3 * r.stdError), schemeColor(scheme), 1);
    }
    svg.polyline(pts, schemeColor(scheme));
    for (const [px, py] of pts) svg.circle(px, py, 2.4, schemeColor(scheme));
  }

  const entries: Array<[string, string, string?]> = schemes.map((s) => [s, schemeColor(s)]);
  entries.push(["reference", "#000000", "5,3"]);
  drawLegend(svg, frame.x0 + 8, frame.y0 + 14, entries);
  return svg.render();
}
