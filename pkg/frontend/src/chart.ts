/**
 * Dependency-free SVG line chart for metric time series. One marker is drawn
 * per point received from the API, the tooltip (a nested <title>, shown by
 * browsers on hover) carries the value exactly as it arrived, and an empty
 * series yields a chart that says so rather than a blank box.
 */

import type { TimeSeriesPoint } from "./types.js";

export interface ChartOptions {
  width?: number;
  height?: number;
}

const MARGIN = { top: 12, right: 16, bottom: 22, left: 16 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Build the SVG markup for a series; pure so tests can assert on the output. */
export function chartMarkup(points: TimeSeriesPoint[], options: ChartOptions = {}): string {
  const width = options.width ?? 640;
  const height = options.height ?? 180;
  const open = `<svg class="chart" viewBox="0 0 ${width} ${height}" role="img">`;

  if (points.length === 0) {
    const label = `<text class="chart-empty" x="${width / 2}" y="${height / 2}" text-anchor="middle">no data in range</text>`;
    return `${open}${label}</svg>`;
  }

  const times = points.map((p) => Date.parse(p.bucket_start));
  const values = points.map((p) => p.value);
  const tMin = Math.min(...times);
  const tMax = Math.max(...times);
  const vMin = Math.min(...values);
  const vMax = Math.max(...values);

  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  // Degenerate extents (single bucket, flat series) still need a finite scale.
  const x = (t: number) => MARGIN.left + (tMax === tMin ? innerW / 2 : ((t - tMin) / (tMax - tMin)) * innerW);
  const y = (v: number) => MARGIN.top + (vMax === vMin ? innerH / 2 : ((vMax - v) / (vMax - vMin)) * innerH);

  const coords = points.map((p, i) => ({ px: x(times[i]), py: y(p.value), point: p }));
  const parts: string[] = [open];
  if (coords.length > 1) {
    const path = coords.map((c) => `${c.px.toFixed(1)},${c.py.toFixed(1)}`).join(" ");
    parts.push(`<polyline class="chart-line" fill="none" points="${path}"/>`);
  }
  for (const { px, py, point } of coords) {
    const value = String(point.value);
    parts.push(
      `<circle class="chart-point" cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" r="3.5" data-value="${esc(value)}">` +
        `<title>${esc(point.bucket_start)} — ${point.metric}: ${esc(value)}</title>` +
        `</circle>`,
    );
  }
  parts.push(
    `<text class="chart-axis" x="${MARGIN.left}" y="${height - 6}">${esc(points[0].bucket_start)}</text>`,
    `<text class="chart-axis" x="${width - MARGIN.right}" y="${height - 6}" text-anchor="end">${esc(points[points.length - 1].bucket_start)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("");
}
