/** Shared panel scaffolding: scales, axes, line/scatter series, legends. */

import { SvgDoc, Attrs, fmt } from "./svg.js";

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Scale {
  (value: number): number;
  readonly domain: [number, number];
  readonly ticks: number[];
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (hi <= lo) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * factor;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + s * 1e-9; v += s) {
    ticks.push(Math.abs(v) < s * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as {
    (value: number): number;
    domain: [number, number];
    ticks: number[];
  };
  scale.domain = domain;
  scale.ticks = niceTicks(d0, d1);
  return scale;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const [r0, r1] = range;
  const span = hi - lo || 1;
  const scale = ((value: number) =>
    r0 + ((Math.log10(value) - lo) / span) * (r1 - r0)) as {
    (value: number): number;
    domain: [number, number];
    ticks: number[];
  };
  scale.domain = domain;
  const ticks: number[] = [];
  for (let e = Math.ceil(lo); e <= Math.floor(hi); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  scale.ticks = ticks.length > 0 ? ticks : [domain[0]];
  return scale;
}

export function extent(values: number[], padFraction = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("no finite values to scale");
  }
  const pad = (hi - lo || Math.abs(hi) || 1) * padFraction;
  return [lo - pad, hi + pad];
}

function tickLabel(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    return value.toExponential(0).replace("+", "");
  }
  return fmt(value);
}

export interface Panel {
  doc: SvgDoc;
  rect: Rect;
  x: Scale;
  y: Scale;
}

export function drawAxes(panel: Panel, xLabel: string, yLabel: string, title = ""): void {
  const { doc, rect, x, y } = panel;
  const bottom = rect.y + rect.h;
  const axis: Attrs = { stroke: "#333", "stroke-width": 1 };
  doc.line(rect.x, bottom, rect.x + rect.w, bottom, axis);
  doc.line(rect.x, rect.y, rect.x, bottom, axis);
  for (const t of x.ticks) {
    const px = x(t);
    doc.line(px, bottom, px, bottom + 4, axis);
    doc.text(px, bottom + 16, tickLabel(t), { "text-anchor": "middle" });
  }
  for (const t of y.ticks) {
    const py = y(t);
    doc.line(rect.x - 4, py, rect.x, py, axis);
    doc.text(rect.x - 7, py + 3, tickLabel(t), { "text-anchor": "end" });
  }
  doc.text(rect.x + rect.w / 2, bottom + 32, xLabel, { "text-anchor": "middle" });
  doc.text(rect.x - 44, rect.y + rect.h / 2, yLabel, {
    "text-anchor": "middle",
    transform: `rotate(-90 ${fmt(rect.x - 44)} ${fmt(rect.y + rect.h / 2)})`,
  });
  if (title) {
    doc.text(rect.x + rect.w / 2, rect.y - 6, title, {
      "text-anchor": "middle",
      "font-weight": "bold",
    });
  }
}

export interface SeriesStyle {
  color: string;
  dash?: string; // stroke-dasharray
  label: string;
}

export function drawLine(
  panel: Panel,
  xs: number[],
  ys: number[],
  style: SeriesStyle,
): void {
  const points: Array<[number, number]> = xs.map((v, i) => [
    panel.x(v),
    panel.y(ys[i]!),
  ]);
  const attrs: Attrs = { stroke: style.color, "stroke-width": 1.4 };
  if (style.dash) {
    attrs["stroke-dasharray"] = style.dash;
  }
  panel.doc.polyline(points, attrs);
}

export function drawScatter(
  panel: Panel,
  xs: number[],
  ys: number[],
  style: SeriesStyle,
): void {
  for (let i = 0; i < xs.length; i += 1) {
    panel.doc.circle(panel.x(xs[i]!), panel.y(ys[i]!), 2, {
      fill: style.color,
      "fill-opacity": "0.7",
      stroke: "none",
    });
  }
}

export function drawLegend(panel: Panel, styles: SeriesStyle[]): void {
  const x0 = panel.rect.x + panel.rect.w - 150;
  let y0 = panel.rect.y + 12;
  for (const style of styles) {
    const attrs: Attrs = { stroke: style.color, "stroke-width": 1.4 };
    if (style.dash) {
      attrs["stroke-dasharray"] = style.dash;
    }
    panel.doc.line(x0, y0 - 3, x0 + 24, y0 - 3, attrs);
    panel.doc.text(x0 + 30, y0, style.label, {});
    y0 += 14;
  }
}

export function zeroLine(panel: Panel): void {
  const [lo, hi] = panel.y.domain;
  if (lo < 0 && hi > 0) {
    panel.doc.line(panel.rect.x, panel.y(0), panel.rect.x + panel.rect.w, panel.y(0), {
      stroke: "#aaa",
      "stroke-width": 0.8,
    });
  }
}

export function referenceLine(panel: Panel, value: number, color = "#888"): void {
  panel.doc.line(
    panel.rect.x,
    panel.y(value),
    panel.rect.x + panel.rect.w,
    panel.y(value),
    { stroke: color, "stroke-width": 0.8 },
  );
}
