/**
 * Sample-path panels: variance path V, accumulated integrated variance U and
 * accumulated Brownian integral Z against time, a few paths per panel.
 */
import { SamplePathRow, SchemaError } from "./csv.js";
import { drawFrame, linearScale, SvgBuilder } from "./svg.js";

const PATH_COLORS = ["#e66101", "#5e3c99", "#1b9e77", "#d95f02", "#7570b3", "#b2abd2", "#e7298a"];

export function renderSamplePaths(rows: SamplePathRow[], title: string): string {
  if (rows.length === 0) throw new SchemaError("no sample-path rows to plot");
  const schemes = [...new Set(rows.map((r) => r.scheme))].sort();
  if (schemes.length !== 1) {
    throw new SchemaError(`sample-path figure plots one scheme at a time, got ${schemes.join(", ")}`);
  }
  const paths = [...new Set(rows.map((r) => r.path))].sort((a, b) => a - b);

  const panels: Array<{ label: string; pick: (r: SamplePathRow) => number }> = [
    { label: "V", pick: (r) => r.v },
    { label: "accumulated U", pick: (r) => r.uCum },
    { label: "accumulated Z", pick: (r) => r.zCum },
  ];

  const panelW = 250;
  const panelH = 220;
  const margin = { left: 64, right: 14, top: 46, bottom: 44, gap: 30 };
  const width = margin.left + 3 * panelW + 2 * margin.gap + margin.right;
  const height = margin.top + panelH + margin.bottom;
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 20, title, { anchor: "middle", size: 14 });

  const ts = rows.map((r) => r.t);
  panels.forEach((panel, pi) => {
    const x0 = margin.left + pi * (panelW + margin.gap);
    const frame = { x0, y0: margin.top, x1: x0 + panelW, y1: margin.top + panelH };
    const vals = rows.map(panel.pick);
    const lo = Math.min(...vals, 0);
    const hi = Math.max(...vals);
    const pad = 0.06 * (hi - lo || 1e-6);
    const xScale = linearScale(Math.min(...ts), Math.max(...ts), frame.x0 + 6, frame.x1 - 6);
    const yScale = linearScale(lo - pad, hi + pad, frame.y1 - 6, frame.y0 + 6);
    drawFrame(svg, frame, xScale, yScale, "t", pi === 0 ? "level" : "");
    svg.text((frame.x0 + frame.x1) / 2, margin.top - 8, panel.label, { anchor: "middle", size: 12 });
    if (lo < 0) svg.line(frame.x0, yScale(0), frame.x1, yScale(0), "#999999", 0.8, "3,3");
    paths.forEach((pid, k) => {
      const line = rows.filter((r) => r.path === pid).sort((a, b) => a.t - b.t);
      const pts = line.map((r): [number, number] => [xScale(r.t), yScale(panel.pick(r))]);
      svg.polyline(pts, PATH_COLORS[k % PATH_COLORS.length], 1.1);
    });
  });
  return svg.render();
}
