/** The four figure kinds rendered from the toolkit's CSV outputs. */

import { column, parseCsv, stringColumn, SchemaError, Table } from "./csv.js";
import {
  drawAxes,
  drawLegend,
  drawLine,
  drawScatter,
  extent,
  linearScale,
  logScale,
  Panel,
  Rect,
  referenceLine,
  zeroLine,
} from "./chart.js";
import { SvgDoc } from "./svg.js";

export type FigureKind = "metrics" | "training" | "timing" | "shor-census";

export const FIGURE_KINDS: FigureKind[] = ["metrics", "training", "timing", "shor-census"];

const SOLID = "#1f77b4"; // corrected runs
const DASHED = "#d62728"; // plain (uncorrected) runs
const DIFF = "#2ca02c"; // difference curves
const NEUTRAL = "#7f7f7f";

const MARGIN = { left: 64, right: 16, top: 28, bottom: 46 };

function panelRects(width: number, panelHeight: number, count: number): Rect[] {
  const rects: Rect[] = [];
  for (let i = 0; i < count; i += 1) {
    rects.push({
      x: MARGIN.left,
      y: MARGIN.top + i * (panelHeight + MARGIN.top + MARGIN.bottom),
      w: width - MARGIN.left - MARGIN.right,
      h: panelHeight,
    });
  }
  return rects;
}

function makeDoc(count: number, width = 640, panelHeight = 180): {
  doc: SvgDoc;
  rects: Rect[];
} {
  const height = count * (panelHeight + MARGIN.top + MARGIN.bottom);
  return { doc: new SvgDoc(width, height), rects: panelRects(width, panelHeight, count) };
}

function linePanel(
  doc: SvgDoc,
  rect: Rect,
  xs: number[],
  yValues: number[][],
): Panel {
  const x = linearScale(extent(xs, 0), [rect.x, rect.x + rect.w]);
  const y = linearScale(extent(yValues.flat()), [rect.y + rect.h, rect.y]);
  return { doc, rect, x, y };
}

// ---------------------------------------------------------------------------

function renderMetrics(table: Table): string {
  const step = column(table, "step");
  const errB = column(table, "sqp_err_bernardi");
  const errC = column(table, "sqp_err_corrected");
  const errD = column(table, "sqp_err_diff");
  const fidB = column(table, "mean_fid_bernardi");
  const fidC = column(table, "mean_fid_corrected");
  const fidD = column(table, "mean_fid_diff");
  const meanSqp = column(table, "mean_sqp_corrected");

  const { doc, rects } = makeDoc(3);
  const stylePlain = { color: DASHED, dash: "6 3", label: "plain functional" };
  const styleCorr = { color: SOLID, label: "corrected functional" };
  const styleDiff = { color: DIFF, dash: "8 3 2 3", label: "difference" };

  const p1 = linePanel(doc, rects[0]!, step, [errB, errC, errD]);
  zeroLine(p1);
  drawLine(p1, step, errB, stylePlain);
  drawLine(p1, step, errC, styleCorr);
  drawLine(p1, step, errD, styleDiff);
  drawAxes(p1, "step", "SQP error", "(a) SQP error vs circuit depth");
  drawLegend(p1, [stylePlain, styleCorr, styleDiff]);

  const p2 = linePanel(doc, rects[1]!, step, [fidB, fidC, fidD]);
  zeroLine(p2);
  drawLine(p2, step, fidB, stylePlain);
  drawLine(p2, step, fidC, styleCorr);
  drawLine(p2, step, fidD, styleDiff);
  drawAxes(p2, "step", "mean fidelity", "(b) mean 1-RDM fidelity");

  const p3 = linePanel(doc, rects[2]!, step, [meanSqp, [0.45, 0.55]]);
  referenceLine(p3, 0.5);
  drawLine(p3, step, meanSqp, styleCorr);
  drawAxes(p3, "step", "mean SQP", "(c) mean SQP of the corrected run");
  return doc.render();
}

function renderTraining(table: Table): string {
  const epoch = column(table, "epoch");
  if (epoch.length === 0) {
    throw new SchemaError("training history is empty");
  }
  const loss = column(table, "rms1f");
  const fid = column(table, "mean_fidelity");

  const { doc, rects } = makeDoc(2);
  const styleLoss = { color: SOLID, label: "RMS infidelity" };
  const styleFid = { color: DIFF, label: "mean fidelity" };

  const p1 = linePanel(doc, rects[0]!, epoch, [loss]);
  drawLine(p1, epoch, loss, styleLoss);
  drawAxes(p1, "epoch", "RMS1F", "(a) training loss");

  const p2 = linePanel(doc, rects[1]!, epoch, [fid]);
  drawLine(p2, epoch, fid, styleFid);
  drawAxes(p2, "epoch", "mean fidelity", "(b) training-set fidelity");
  return doc.render();
}

function renderTiming(table: Table): string {
  const methods = stringColumn(table, "method");
  const qubits = column(table, "n_qubits");
  const seconds = column(table, "seconds_per_gate");
  if (seconds.some((s) => s <= 0)) {
    throw new SchemaError("seconds_per_gate must be positive for the log axis");
  }

  const { doc, rects } = makeDoc(1, 640, 260);
  const rect = rects[0]!;
  const x = linearScale(extent(qubits, 0.02), [rect.x, rect.x + rect.w]);
  const y = logScale(
    [Math.min(...seconds) / 2, Math.max(...seconds) * 2],
    [rect.y + rect.h, rect.y],
  );
  const panel: Panel = { doc, rect, x, y };

  const styles: Record<string, { color: string; dash?: string; label: string }> = {
    exact: { color: NEUTRAL, label: "exact statevector" },
    bernardi: { color: DASHED, dash: "6 3", label: "plain functional" },
    corrected: { color: SOLID, label: "corrected functional" },
  };
  const seen: Array<(typeof styles)[string]> = [];
  for (const method of ["exact", "bernardi", "corrected"]) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < methods.length; i += 1) {
      if (methods[i] === method) {
        xs.push(qubits[i]!);
        ys.push(seconds[i]!);
      }
    }
    if (xs.length > 0) {
      const style = styles[method]!;
      drawLine(panel, xs, ys, style);
      drawScatter(panel, xs, ys, style);
      seen.push(style);
    }
  }
  drawAxes(panel, "qubits", "seconds per gate (log)", "wall time per gate");
  drawLegend(panel, seen);
  return doc.render();
}

function renderShorCensus(table: Table): string {
  const n = column(table, "N");
  const count = column(table, "count_as");
  const prob = column(table, "prob_as");

  const { doc, rects } = makeDoc(2);
  const style = { color: SOLID, label: "" };

  const r1 = rects[0]!;
  const p1: Panel = {
    doc,
    rect: r1,
    x: linearScale(extent(n, 0.02), [r1.x, r1.x + r1.w]),
    y: linearScale(extent(count), [r1.y + r1.h, r1.y]),
  };
  drawScatter(p1, n, count, style);
  drawAxes(p1, "semiprime N", "number of usable bases", "(a) usable-base count");

  const r2 = rects[1]!;
  const p2: Panel = {
    doc,
    rect: r2,
    x: linearScale(extent(n, 0.02), [r2.x, r2.x + r2.w]),
    y: linearScale(extent(prob), [r2.y + r2.h, r2.y]),
  };
  drawScatter(p2, n, prob, style);
  drawAxes(p2, "semiprime N", "sampling probability", "(b) chance a random base works");
  return doc.render();
}

// ---------------------------------------------------------------------------

export function render(kind: FigureKind, csvText: string): string {
  const table = parseCsv(csvText);
  switch (kind) {
    case "metrics":
      return renderMetrics(table);
    case "training":
      return renderTraining(table);
    case "timing":
      return renderTiming(table);
    case "shor-census":
      return renderShorCensus(table);
    default:
      throw new SchemaError(`unknown figure kind '${kind as string}'`);
  }
}
