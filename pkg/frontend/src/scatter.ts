import type { ParetoPoint } from "./types.js";

export interface ScatterOptions {
  width: number;
  height: number;
  margin: number;
}

const DEFAULTS: ScatterOptions = { width: 420, height: 320, margin: 40 };

export interface Scales {
  x(v: number): number;
  y(v: number): number;
}

export function makeScales(points: ParetoPoint[], opts: ScatterOptions): Scales {
  const xs = points.map((p) => p.F_s);
  const ys = points.map((p) => p.F_a);
  const pad = (lo: number, hi: number): [number, number] => {
    const span = hi - lo;
    return span > 0 ? [lo - span * 0.08, hi + span * 0.08] : [lo - 0.05, hi + 0.05];
  };
  const [x0, x1] = pad(Math.min(...xs), Math.max(...xs));
  const [y0, y1] = pad(Math.min(...ys), Math.max(...ys));
  const innerW = opts.width - 2 * opts.margin;
  const innerH = opts.height - 2 * opts.margin;
  return {
    x: (v) => opts.margin + ((v - x0) / (x1 - x0)) * innerW,
    y: (v) => opts.height - opts.margin - ((v - y0) / (y1 - y0)) * innerH,
  };
}

function fmt(v: number): string {
  return v.toFixed(3);
}

/**
 * Pareto front as an SVG string: one circle per solution carrying its
 * data-index, the midpoint drawn distinctly, the selected point
 * highlighted, tooltips with (F_s, F_a) to 3 decimals.
 */
export function renderFrontSvg(
  points: ParetoPoint[],
  selected: number | null,
  midpointIndex: number | null,
  options?: Partial<ScatterOptions>,
): string {
  const opts = { ...DEFAULTS, ...options };
  const { width, height, margin } = opts;
  if (points.length === 0) {
    return (
      `<svg class="front" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
      `<text class="empty-state" x="${width / 2}" y="${height / 2}" text-anchor="middle">` +
      `no solutions on the front</text></svg>`
    );
  }
  const scales = makeScales(points, opts);
  const axisY = height - margin;
  const parts: string[] = [];
  parts.push(
    `<svg class="front" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  );
  parts.push(
    `<line class="axis" x1="${margin}" y1="${axisY}" x2="${width - margin}" y2="${axisY}"/>`,
    `<line class="axis" x1="${margin}" y1="${margin}" x2="${margin}" y2="${axisY}"/>`,
    `<text class="axis-label" x="${width / 2}" y="${height - 8}" text-anchor="middle">subjective score F_s</text>`,
    `<text class="axis-label" x="12" y="${height / 2}" transform="rotate(-90 12 ${height / 2})" text-anchor="middle">aesthetic score F_a</text>`,
  );
  for (const p of points) {
    const cx = scales.x(p.F_s);
    const cy = scales.y(p.F_a);
    const classes = ["pt"];
    if (p.index === midpointIndex) classes.push("midpoint");
    if (p.index === selected) classes.push("selected");
    const r = p.index === midpointIndex ? 8 : 5;
    parts.push(
      `<circle class="${classes.join(" ")}" data-index="${p.index}" cx="${cx.toFixed(1)}" ` +
        `cy="${cy.toFixed(1)}" r="${r}"><title>(${fmt(p.F_s)}, ${fmt(p.F_a)})</title></circle>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
