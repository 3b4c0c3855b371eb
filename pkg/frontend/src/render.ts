/** SVG rendering of per-alpha error figures.
 *
 * The figure is a pure function of the parsed rows and the options; the
 * emitted SVG text is byte-identical across runs (fixed styling, fixed
 * number formatting, no timestamps or randomness).
 */

import {
  BenchmarkRow,
  EmptyInput,
  listMethods,
  methodLabel,
} from "./csv.js";
import { ScaleKind, linearScale, makeScale } from "./scale.js";

export interface FigureOptions {
  /** y-scale for the error axis */
  scale?: ScaleKind;
  /** subset of methods, in the caller's order; default: all, canonical order */
  methods?: string[];
  width?: number;
  height?: number;
}

const PALETTE: Record<string, string> = {
  contact1: "#1f77b4",
  contact2: "#d62728",
  contact2_forced: "#d62728",
  leapfrog: "#2ca02c",
  vnc: "#9467bd",
  ruth3: "#ff7f0e",
  rk4: "#8c564b",
};

const FALLBACK_COLORS = ["#17becf", "#e377c2", "#bcbd22", "#7f7f7f"];

function colorFor(method: string, index: number): string {
  return PALETTE[method] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length]!;
}

/** Fixed-precision coordinate so output never depends on float printing quirks. */
function fmt(v: number): string {
  return v.toFixed(2);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render the error-vs-time figure for a single alpha. */
export function renderErrorFigure(
  rows: BenchmarkRow[],
  alpha: number,
  options: FigureOptions = {},
): string {
  const cell = rows.filter((r) => r.alpha === alpha);
  if (cell.length === 0) {
    throw new EmptyInput(`no rows for alpha = ${alpha}`);
  }
  const methods = options.methods ?? listMethods(cell);
  const series = methods
    .map((m) => ({
      method: m,
      points: cell.filter((r) => r.method === m).sort((a, b) => a.t - b.t),
    }))
    .filter((s) => s.points.length > 0);
  if (series.length === 0) {
    throw new EmptyInput(`no rows for the requested methods at alpha = ${alpha}`);
  }

  const width = options.width ?? 840;
  const height = options.height ?? 520;
  const margin = { left: 70, right: 170, top: 45, bottom: 55 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const all = series.flatMap((s) => s.points);
  const tLo = Math.min(...all.map((p) => p.t));
  const tHi = Math.max(...all.map((p) => p.t));
  const eLo = Math.min(...all.map((p) => p.err));
  const eHi = Math.max(...all.map((p) => p.err));

  const xScale = linearScale(tLo, tHi);
  const yScale = makeScale(options.scale ?? "symlog", eLo, eHi);

  const px = (t: number) => margin.left + xScale.pos(t) * plotW;
  const py = (e: number) => margin.top + (1 - yScale.pos(e)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${fmt(margin.left + plotW / 2)}" y="26" text-anchor="middle" ` +
      `font-size="16">Regularized error vs time (alpha = ${alpha})</text>`,
  );

  // gridlines and ticks
  for (const tv of xScale.ticks()) {
    const x = px(tv);
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(margin.top)}" x2="${fmt(x)}" ` +
        `y2="${fmt(margin.top + plotH)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${fmt(margin.top + plotH + 20)}" text-anchor="middle" ` +
        `font-size="12">${esc(xScale.label(tv))}</text>`,
    );
  }
  for (const ev of yScale.ticks()) {
    const y = py(ev);
    parts.push(
      `<line x1="${fmt(margin.left)}" y1="${fmt(y)}" x2="${fmt(margin.left + plotW)}" ` +
        `y2="${fmt(y)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(margin.left - 8)}" y="${fmt(y + 4)}" text-anchor="end" ` +
        `font-size="12">${esc(yScale.label(ev))}</text>`,
    );
  }

  // frame and axis titles
  parts.push(
    `<rect x="${fmt(margin.left)}" y="${fmt(margin.top)}" width="${fmt(plotW)}" ` +
      `height="${fmt(plotH)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${fmt(margin.left + plotW / 2)}" y="${fmt(height - 14)}" ` +
      `text-anchor="middle" font-size="14">t</text>`,
  );
  parts.push(
    `<text x="20" y="${fmt(margin.top + plotH / 2)}" text-anchor="middle" font-size="14" ` +
      `transform="rotate(-90 20 ${fmt(margin.top + plotH / 2)})">err</text>`,
  );

  // one polyline per method
  series.forEach((s, i) => {
    const d = s.points.map((p) => `${fmt(px(p.t))},${fmt(py(p.err))}`).join(" ");
    parts.push(
      `<polyline points="${d}" fill="none" stroke="${colorFor(s.method, i)}" ` +
        `stroke-width="1.5" data-method="${esc(s.method)}"/>`,
    );
  });

  // legend
  const lx = margin.left + plotW + 16;
  series.forEach((s, i) => {
    const y = margin.top + 12 + i * 22;
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(y)}" x2="${fmt(lx + 26)}" y2="${fmt(y)}" ` +
        `stroke="${colorFor(s.method, i)}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${fmt(lx + 32)}" y="${fmt(y + 4)}" font-size="13" ` +
        `class="legend-label">${esc(methodLabel(s.method))}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
