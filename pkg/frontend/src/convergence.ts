/**
 * Error-vs-steps figure: one log-log panel per quantity, one line per scheme,
 * and a dotted horizontal line at three times the median Monte Carlo standard
 * error, below which differences between schemes are noise.
 */
import { ResultRecord, SchemaError } from "./csv.js";
import { drawFrame, drawLegend, logScale, schemeColor, SvgBuilder } from "./svg.js";

const ERROR_FLOOR = 1e-12; // log-scale guard for exact zeros

export function renderConvergence(records: ResultRecord[], title: string): string {
  const rows = records.filter((r) => r.scheme !== "reference");
  if (rows.length === 0) throw new SchemaError("no simulation records to plot");
  const quantities = [...new Set(rows.map((r) => r.quantity))].sort();
  const schemes = [...new Set(rows.map((r) => r.scheme))].sort();

  const panelW = 260;
  const panelH = 250;
  const margin = { left: 64, right: 16, top: 48, bottom: 46, gap: 26 };
  const width = margin.left + quantities.length * panelW + (quantities.length - 1) * margin.gap + margin.right;
  const height = margin.top + panelH + margin.bottom;
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 20, title, { anchor: "middle", size: 14 });

  quantities.forEach((quantity, qi) => {
    const panel = rows.filter((r) => r.quantity === quantity);
    const x0 = margin.left + qi * (panelW + margin.gap);
    const frame = { x0, y0: margin.top, x1: x0 + panelW, y1: margin.top + panelH };

    const xs = panel.map((r) => r.nSteps);
    const errs = panel.map((r) => Math.max(r.absError, ERROR_FLOOR)).filter((e) => Number.isFinite(e));
    if (errs.length === 0) throw new SchemaError(`quantity ${quantity}: no finite errors`);
    const ses = panel.map((r) => r.stdError).filter((s) => Number.isFinite(s) && s > 0).sort((a, b) => a - b);
    const band = ses.length ? 3 * ses[Math.floor(ses.length / 2)] : NaN;

    let yLo = Math.min(...errs);
    let yHi = Math.max(...errs);
    if (Number.isFinite(band)) {
      yLo = Math.min(yLo, band);
      yHi = Math.max(yHi, band);
    }
    const xScale = logScale(Math.min(...xs), Math.max(...xs), frame.x0 + 8, frame.x1 - 8);
    const yScale = logScale(yLo / 1.5, yHi * 1.5, frame.y1 - 8, frame.y0 + 8);
    drawFrame(svg, frame, xScale, yScale, "time steps", qi === 0 ? "absolute error" : "");
    svg.text((frame.x0 + frame.x1) / 2, margin.top - 8, quantity, { anchor: "middle", size: 12 });

    if (Number.isFinite(band)) {
      svg.line(frame.x0, yScale(band), frame.x1, yScale(band), "#444444", 1, "2,3");
    }
    for (const scheme of schemes) {
      const line = panel
        .filter((r) => r.scheme === scheme && Number.isFinite(r.absError))
        .sort((a, b) => a.nSteps - b.nSteps);
      const pts = line.map((r): [number, number] => [xScale(r.nSteps), yScale(Math.max(r.absError, ERROR_FLOOR))]);
      svg.polyline(pts, schemeColor(scheme));
      for (const [px, py] of pts) svg.circle(px, py, 2.2, schemeColor(scheme));
    }
  });

  const entries: Array<[string, string, string?]> = schemes.map((s) => [s, schemeColor(s)]);
  entries.push(["3 x median SE", "#444444", "2,3"]);
  drawLegend(svg, margin.left + 6, margin.top + 14, entries);
  return svg.render();
}
