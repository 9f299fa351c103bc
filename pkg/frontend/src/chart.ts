/**
 * Multi-panel SVG line charts for trace tables: one panel per trace,
 * one line per alternative, x = iteration, y = probability.
 */

import { TraceTable } from "./trace";

export type Metric = "policy" | "mixture";

export interface ChartOptions {
  metric?: Metric;
  /** panels per row; 0 means all panels in one row */
  columns?: number;
  panelWidth?: number;
  panelHeight?: number;
}

// Colour-word labels map to their own colour; anything else cycles the palette.
const LABEL_COLORS: Record<string, string> = {
  R: "#d62728",
  G: "#2ca02c",
  B: "#1f77b4",
  red: "#d62728",
  green: "#2ca02c",
  blue: "#1f77b4",
};
const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

function colorFor(label: string, index: number): string {
  return LABEL_COLORS[label] ?? PALETTE[index % PALETTE.length];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function xTicks(maxIteration: number): number[] {
  if (maxIteration <= 0) return [0];
  const rough = maxIteration / 4;
  const magnitude = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * magnitude).find((s) => s >= rough)!;
  const ticks: number[] = [];
  for (let v = 0; v <= maxIteration + step * 0.01; v += step) ticks.push(Math.round(v));
  return ticks;
}

function panelSvg(
  table: TraceTable,
  metric: Metric,
  x0: number,
  y0: number,
  width: number,
  height: number,
): string {
  const ml = 38,
    mr = 10,
    mt = 24,
    mb = 30;
  const pw = width - ml - mr;
  const ph = height - mt - mb;
  const maxIter = Math.max(...table.points.map((p) => p.iteration), 1);
  const xOf = (it: number) => x0 + ml + (it / maxIter) * pw;
  const yOf = (p: number) => y0 + mt + (1 - p) * ph;

  let s = "";
  s += `<text x="${x0 + ml}" y="${y0 + 14}" font-size="11" font-weight="600" fill="#222">${esc(table.name)}</text>\n`;

  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const y = yOf(tick);
    s += `<line x1="${x0 + ml}" y1="${y.toFixed(1)}" x2="${x0 + ml + pw}" y2="${y.toFixed(1)}" stroke="#e5e5e5" stroke-width="0.6"/>\n`;
    s += `<text x="${x0 + ml - 4}" y="${(y + 3).toFixed(1)}" font-size="8" fill="#666" text-anchor="end">${tick}</text>\n`;
  }
  for (const tick of xTicks(maxIter)) {
    const x = xOf(tick);
    s += `<text x="${x.toFixed(1)}" y="${(y0 + mt + ph + 12).toFixed(1)}" font-size="8" fill="#666" text-anchor="middle">${tick}</text>\n`;
  }
  s += `<rect x="${x0 + ml}" y="${y0 + mt}" width="${pw}" height="${ph}" fill="none" stroke="#999" stroke-width="0.8"/>\n`;
  s += `<text x="${(x0 + ml + pw / 2).toFixed(1)}" y="${(y0 + height - 4).toFixed(1)}" font-size="9" fill="#444" text-anchor="middle">iteration</text>\n`;

  table.alternatives.forEach((label, idx) => {
    const color = colorFor(label, idx);
    const pts = table.points
      .map((p) => {
        const value = metric === "policy" ? p.policy[idx] : p.mixture[idx];
        return `${xOf(p.iteration).toFixed(1)},${yOf(value).toFixed(1)}`;
      })
      .join(" ");
    s += `<polyline fill="none" stroke="${color}" stroke-width="1.4" points="${pts}"/>\n`;
    const lx = x0 + ml + 6;
    const ly = y0 + mt + 10 + idx * 11;
    s += `<line x1="${lx}" y1="${ly - 3}" x2="${lx + 12}" y2="${ly - 3}" stroke="${color}" stroke-width="2"/>\n`;
    s += `<text x="${lx + 16}" y="${ly}" font-size="9" fill="#333">${esc(label)}</text>\n`;
  });
  return s;
}

export function renderChart(tables: TraceTable[], options: ChartOptions = {}): string {
  if (tables.length === 0) {
    throw new Error("nothing to plot: no trace tables given");
  }
  const metric = options.metric ?? "policy";
  const panelWidth = options.panelWidth ?? 340;
  const panelHeight = options.panelHeight ?? 240;
  const columns = options.columns && options.columns > 0 ? options.columns : tables.length;
  const rows = Math.ceil(tables.length / columns);
  const width = columns * panelWidth;
  const height = rows * panelHeight;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${width}" height="${height}" fill="#ffffff"/>\n`;
  tables.forEach((table, i) => {
    const col = i % columns;
    const row = Math.floor(i / columns);
    s += panelSvg(table, metric, col * panelWidth, row * panelHeight, panelWidth, panelHeight);
  });
  s += "</svg>\n";
  return s;
}
