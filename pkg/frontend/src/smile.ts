/**
 * Implied-volatility slice figure: volatility curves per scheme against the
 * analytical reference (top), per-strike absolute errors (bottom), and the
 * mean absolute error per scheme in the title block. Strikes whose Monte
 * Carlo price was not invertible arrive as NaN and leave gaps.
 */
import { ResultRecord, SchemaError } from "./csv.js";
import { drawFrame, drawLegend, fmtTick, linearScale, logScale, schemeColor, SvgBuilder } from "./svg.js";

function strikeOf(quantity: string): number | null {
  const m = quantity.match(/^iv\(([-0-9.eE+]+)\)$/);
  return m ? Number(m[1]) : null;
}

export function renderSmile(records: ResultRecord[], title: string): string {
  const slice = records.filter((r) => strikeOf(r.quantity) !== null);
  if (slice.length === 0) throw new SchemaError("no iv(K) records to plot");
  const schemes = [...new Set(slice.map((r) => r.scheme))].sort();
  const strikes = [...new Set(slice.map((r) => strikeOf(r.quantity) as number))].sort((a, b) => a - b);
  const maes = records.filter((r) => r.quantity === "iv_mae");
  const referenceOnly = schemes.length === 1 && schemes[0] === "reference";

  const width = 560;
  const topH = 240;
  const botH = 130;
  const margin = { left: 70, right: 18, top: 52, mid: 46, bottom: 46 };
  const height = margin.top + topH + margin.mid + (referenceOnly ? 0 : botH + margin.bottom);
  const svg = new SvgBuilder(width, referenceOnly ? margin.top + topH + margin.mid : height);
  svg.text(width / 2, 18, title, { anchor: "middle", size: 14 });
  const maeText = maes
    .sort((a, b) => (a.scheme < b.scheme ? -1 : 1))
    .map((r) => `${r.scheme}: MAE=${Number.isFinite(r.estimate) ? r.estimate.toExponential(2) : "n/a"}`)
    .join("   ");
  if (maeText) svg.text(width / 2, 34, maeText, { anchor: "middle", size: 11 });

  const frame = { x0: margin.left, y0: margin.top, x1: width - margin.right, y1: margin.top + topH };
  const vols: number[] = [];
  for (const r of slice) {
    if (Number.isFinite(r.estimate)) vols.push(r.estimate);
    if (Number.isFinite(r.reference)) vols.push(r.reference);
  }
  if (vols.length === 0) throw new SchemaError("no finite implied volatilities");
  const pad = 0.08 * (Math.max(...vols) - Math.min(...vols) || 0.01);
  const xScale = linearScale(strikes[0], strikes[strikes.length - 1], frame.x0 + 10, frame.x1 - 10);
  const yScale = linearScale(Math.min(...vols) - pad, Math.max(...vols) + pad, frame.y1 - 8, frame.y0 + 8);
  drawFrame(svg, frame, xScale, yScale, "moneyness K/S0", "implied volatility");

  // analytical reference curve from the reference column (identical across schemes)
  const refPts: Array<[number, number]> = strikes
    .map((k): [number, number] | null => {
      const row = slice.find((r) => strikeOf(r.quantity) === k && Number.isFinite(r.reference));
      return row ? [xScale(k), yScale(row.reference)] : null;
    })
    .filter((p): p is [number, number] => p !== null);
  svg.polyline(refPts, "#000000", 1.5, "5,3");

  for (const scheme of schemes) {
    if (scheme === "reference") continue;
    const pts: Array<[number, number]> = [];
    for (const k of strikes) {
      const row = slice.find((r) => r.scheme === scheme && strikeOf(r.quantity) === k);
      if (row && Number.isFinite(row.estimate)) pts.push([xScale(k), yScale(row.estimate)]);
    }
    svg.polyline(pts, schemeColor(scheme));
    for (const [px, py] of pts) svg.circle(px, py, 2.4, schemeColor(scheme));
  }

  const legendEntries: Array<[string, string, string?]> = [["reference", "#000000", "5,3"]];
  for (const s of schemes) if (s !== "reference") legendEntries.push([s, schemeColor(s)]);
  drawLegend(svg, frame.x0 + 8, frame.y0 + 14, legendEntries);

  if (!referenceOnly) {
    const errFrame = {
      x0: margin.left,
      y0: margin.top + topH + margin.mid,
      x1: width - margin.right,
      y1: margin.top + topH + margin.mid + botH,
    };
    const errs = slice.map((r) => r.absError).filter((e) => Number.isFinite(e) && e > 0);
    if (errs.length > 0) {
      const eScale = logScale(Math.min(...errs) / 1.5, Math.max(...errs) * 1.5, errFrame.y1 - 6, errFrame.y0 + 6);
      drawFrame(svg, errFrame, xScale, eScale, "moneyness K/S0", "|iv error|");
      for (const scheme of schemes) {
        if (scheme === "reference") continue;
        const pts: Array<[number, number]> = [];
        for (const k of strikes) {
          const row = slice.find((r) => r.scheme === scheme && strikeOf(r.quantity) === k);
          if (row && Number.isFinite(row.absError) && row.absError > 0) {
            pts.push([xScale(k), eScale(row.absError)]);
          }
        }
        svg.polyline(pts, schemeColor(scheme), 1.2);
        for (const [px, py] of pts) svg.circle(px, py, 2, schemeColor(scheme));
      }
    } else {
      svg.text((errFrame.x0 + errFrame.x1) / 2, (errFrame.y0 + errFrame.y1) / 2, "no finite errors", {
        anchor: "middle",
      });
    }
  }
  return svg.render();
}

export { strikeOf, fmtTick };
