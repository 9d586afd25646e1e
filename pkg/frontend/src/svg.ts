/**
 * Minimal deterministic SVG toolkit: scales, ticks, shapes. No timestamps,
 * no randomness, fixed number formatting - identical input yields identical
 * bytes, which the golden-image tests rely on.
 */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  if (x === 0) return "0";
  const r = Math.round(x * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

/** Tick label formatting: compact fixed/exponent hybrid. */
export function fmtTick(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e-3 && a < 1e4) {
    const s = x.toPrecision(4);
    return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
  }
  const exp = Math.floor(Math.log10(a));
  const mant = x / 10 ** exp;
  const m = Math.round(mant * 100) / 100;
  return m === 1 ? `1e${exp}` : `${m}e${exp}`;
}

export interface Scale {
  (x: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (!(hi > lo)) hi = lo + 1;
  const f = ((x: number) => outLo + ((x - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  const ticks: number[] = [];
  const s = step * mult;
  for (let t = Math.ceil(lo / s) * s; t <= hi + 1e-12 * span; t += s) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  f.ticks = ticks;
  return f;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) throw new Error("log scale needs positive bounds");
  if (!(hi > lo)) hi = lo * 10;
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const f = ((x: number) => outLo + ((Math.log10(x) - llo) / (lhi - llo)) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e += 1) {
    ticks.push(10 ** e);
  }
  if (ticks.length < 2) f.ticks = [lo, hi];
  else f.ticks = ticks;
  return f;
}

// fixed scheme palette; unknown names fall back by stable hash
const PALETTE: Record<string, string> = {
  ivi: "#e66101",
  ivi_simple: "#fdb863",
  qe: "#5e3c99",
  euler: "#b2abd2",
  reference: "#000000",
};
const FALLBACK = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"];

export function schemeColor(name: string): string {
  if (name in PALETTE) return PALETTE[name];
  let h = 0;
  for (const ch of name) h = (h * 31 + ch.charCodeAt(0)) % 997;
  return FALLBACK[h % FALLBACK.length];
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5, dash?: string): void {
    if (pts.length === 0) return;
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    const coords = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${coords}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; fill?: string; rotate?: boolean } = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#000000";
    const transform = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}"${transform}>${escapeXml(s)}</text>`,
    );
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface PanelFrame {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Draw axes box with ticks for the given scales (x bottom, y left). */
export function drawFrame(
  svg: SvgBuilder,
  frame: PanelFrame,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
): void {
  const { x0, y0, x1, y1 } = frame;
  svg.line(x0, y1, x1, y1, "#000000");
  svg.line(x0, y0, x0, y1, "#000000");
  for (const t of xScale.ticks) {
    const px = xScale(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    svg.line(px, y1, px, y1 + 4, "#000000");
    svg.text(px, y1 + 16, fmtTick(t), { anchor: "middle", size: 10 });
  }
  for (const t of yScale.ticks) {
    const py = yScale(t);
    if (py < y0 - 0.5 || py > y1 + 0.5) continue;
    svg.line(x0 - 4, py, x0, py, "#000000");
    svg.text(x0 - 6, py + 3, fmtTick(t), { anchor: "end", size: 10 });
    svg.line(x0, py, x1, py, "#f0f0f0");
  }
  svg.text((x0 + x1) / 2, y1 + 30, xLabel, { anchor: "middle" });
  svg.text(x0 - 46, (y0 + y1) / 2, yLabel, { anchor: "middle", rotate: true });
}

export function drawLegend(svg: SvgBuilder, x: number, y: number, entries: Array<[string, string, string?]>): void {
  entries.forEach(([label, color, dash], i) => {
    const yy = y + 14 * i;
    svg.line(x, yy - 3, x + 18, yy - 3, color, 2, dash);
    svg.text(x + 24, yy, label, { size: 10 });
  });
}
