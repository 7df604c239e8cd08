/**
 * Hand-rolled SVG views: cost bars, survival overlays, and the village map.
 * Every number shown is read from a service report; the charts add layout,
 * colors and percentage labels, nothing else.
 */

import { maxValue, stepVertices, zeroCount } from "./curves.js";
import { el, esc, linearScale, ticks, trim } from "./svg.js";
import type { CurveData, SiteRow } from "./types.js";

/** Line colors for pinned results, in pin order. */
export const SERIES_COLORS = ["#1f77b4", "#e08214", "#2ca02c", "#d62728"] as const;
export const HISTORICAL_COLOR = "#777777";

export const PRIORITY_COLORS: Record<string, string> = {
  "plant-priority": "forestgreen",
  satisfied: "firebrick",
};

export interface CostBar {
  label: string;
  /** integer tree-metres, straight from the report; used only to scale bars */
  cost: number;
  /** preformatted display text, e.g. "1,718.187 tree-km" */
  display: string;
  color?: string;
}

export function costBarsSvg(bars: CostBar[], width = 520): string {
  const labelW = 170;
  const valueW = 130;
  const rowH = 30;
  const height = bars.length * rowH + 12;
  const max = Math.max(...bars.map((b) => b.cost), 1);
  const scale = linearScale(0, max, 0, width - labelW - valueW - 16);
  const rows = bars.map((bar, i) => {
    const y = 6 + i * rowH;
    const w = Math.max(scale(bar.cost), 1);
    return [
      el(
        "text",
        { x: labelW - 8, y: y + 19, "text-anchor": "end", class: "bar-label" },
        esc(bar.label),
      ),
      el("rect", {
        x: labelW,
        y: y + 4,
        width: trim(w),
        height: rowH - 10,
        fill: bar.color ?? SERIES_COLORS[0],
      }),
      el(
        "text",
        { x: labelW + w + 6, y: y + 19, class: "bar-value" },
        esc(bar.display),
      ),
    ].join("");
  });
  return el(
    "svg",
    {
      viewBox: `0 0 ${width} ${height}`,
      width,
      height,
      role: "img",
      "aria-label": "Cost comparison",
    },
    rows,
  );
}

export interface CurveSeries {
  label: string;
  curve: CurveData;
  color: string;
  dashed?: boolean;
}

export interface OverlayOptions {
  width?: number;
  height?: number;
  xLabel?: string;
}

/**
 * Overlaid survival curves on shared axes: x spans the largest value in any
 * series, y is the fraction of observations at or above x. Series whose
 * curve has mass at zero get a marker and a "traders at zero intake" note.
 */
export function survivalOverlaySvg(series: CurveSeries[], opts: OverlayOptions = {}): string {
  const width = opts.width ?? 520;
  const height = opts.height ?? 300;
  const m = { left: 48, right: 12, top: 14, bottom: 40 };
  const xMax = Math.max(maxValue(series.map((s) => s.curve)), 1);
  const x = linearScale(0, xMax, m.left, width - m.right);
  const y = linearScale(0, 1, height - m.bottom, m.top);

  const parts: string[] = [];
  // frame and ticks
  parts.push(
    el("line", { x1: m.left, y1: y(0), x2: width - m.right, y2: y(0), class: "axis" }),
    el("line", { x1: m.left, y1: y(0), x2: m.left, y2: y(1), class: "axis" }),
  );
  for (const t of ticks(xMax)) {
    parts.push(
      el("line", { x1: x(t), y1: y(0), x2: x(t), y2: y(0) + 4, class: "axis" }),
      el("text", { x: x(t), y: y(0) + 16, "text-anchor": "middle", class: "tick" }, trim(t)),
    );
  }
  for (const f of [0, 0.25, 0.5, 0.75, 1]) {
    parts.push(
      el("line", { x1: m.left - 4, y1: y(f), x2: m.left, y2: y(f), class: "axis" }),
      el(
        "text",
        { x: m.left - 7, y: y(f) + 4, "text-anchor": "end", class: "tick" },
        `${f * 100}%`,
      ),
    );
  }
  parts.push(
    el(
      "text",
      { x: (m.left + width - m.right) / 2, y: height - 6, "text-anchor": "middle", class: "tick" },
      esc(opts.xLabel ?? "trees"),
    ),
  );

  for (const s of series) {
    const verts = stepVertices(s.curve, xMax);
    if (!verts.length) continue;
    const pointsAttr = verts.map(([vx, vy]) => `${trim(x(vx))},${trim(y(vy))}`).join(" ");
    const attrs: Record<string, string | number> = {
      points: pointsAttr,
      fill: "none",
      stroke: s.color,
      "stroke-width": 1.8,
    };
    if (s.dashed) attrs["stroke-dasharray"] = "5 3";
    parts.push(el("polyline", attrs));

    const zeros = zeroCount(s.curve);
    if (zeros > 0) {
      // flag the drop at v=0: these observations never rise off the floor
      const level = (s.curve.n - zeros) / s.curve.n;
      parts.push(
        el("circle", { cx: x(0), cy: y(level), r: 4, fill: s.color, class: "zero-flag" }),
        el(
          "text",
          { x: x(0) + 8, y: y(level) - 6, class: "zero-flag-note", fill: s.color },
          esc(`${zeros} trader${zeros === 1 ? "" : "s"} at zero intake`),
        ),
      );
    }
  }

  // legend, one row per series, inside the top-right corner
  series.forEach((s, i) => {
    const ly = m.top + 8 + i * 16;
    const lx = width - m.right - 150;
    const lineAttrs: Record<string, string | number> = {
      x1: lx,
      y1: ly,
      x2: lx + 22,
      y2: ly,
      stroke: s.color,
      "stroke-width": 2,
    };
    if (s.dashed) lineAttrs["stroke-dasharray"] = "5 3";
    parts.push(
      el("line", lineAttrs),
      el("text", { x: lx + 28, y: ly + 4, class: "legend" }, esc(s.label)),
    );
  });

  return el(
    "svg",
    { viewBox: `0 0 ${width} ${height}`, width, height, role: "img", "aria-label": "Survival curves" },
    parts,
  );
}

export interface MapOptions {
  width?: number;
  height?: number;
  traders?: SiteRow[];
}

/**
 * Village scatter in the dataset's own planar coordinates (no basemap),
 * colored by priority class; traders appear as small grey squares for
 * orientation when provided.
 */
export function priorityMapSvg(
  villages: SiteRow[],
  labels: Map<string, string>,
  opts: MapOptions = {},
): string {
  const width = opts.width ?? 440;
  const height = opts.height ?? 440;
  const traders = opts.traders ?? [];
  const all = [...villages, ...traders];
  if (!all.length) return el("svg", { viewBox: `0 0 ${width} ${height}`, width, height }, []);

  const xs = all.map((s) => s[1]);
  const ys = all.map((s) => s[2]);
  const pad = 0.06;
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const spanX = (x1 - x0) || 1;
  const spanY = (y1 - y0) || 1;
  // y flips: dataset y grows north, screen y grows down
  const sx = linearScale(x0 - pad * spanX, x1 + pad * spanX, 0, width);
  const sy = linearScale(y0 - pad * spanY, y1 + pad * spanY, height - 30, 0);

  const parts: string[] = [];
  for (const [id, tx, ty] of traders) {
    parts.push(
      el("rect", {
        x: trim(sx(tx) - 3),
        y: trim(sy(ty) - 3),
        width: 6,
        height: 6,
        fill: "#555555",
        class: "trader-site",
      }, [el("title", {}, esc(id))]),
    );
  }
  const counts = new Map<string, number>();
  for (const [id, vx, vy] of villages) {
    const label = labels.get(id) ?? "unknown";
    counts.set(label, (counts.get(label) ?? 0) + 1);
    parts.push(
      el(
        "circle",
        {
          cx: trim(sx(vx)),
          cy: trim(sy(vy)),
          r: 5,
          fill: PRIORITY_COLORS[label] ?? "#999999",
          stroke: "white",
          "stroke-width": 1,
          class: `village-site ${label}`,
        },
        [el("title", {}, esc(`${id}: ${label}`))],
      ),
    );
  }

  // legend with class counts along the bottom edge
  let lx = 10;
  for (const [label, n] of counts) {
    parts.push(
      el("circle", { cx: lx + 5, cy: height - 12, r: 5, fill: PRIORITY_COLORS[label] ?? "#999999" }),
      el("text", { x: lx + 14, y: height - 8, class: "legend" }, esc(`${label} (${n})`)),
    );
    lx += 16 + 8 * `${label} (${n})`.length;
  }

  return el(
    "svg",
    { viewBox: `0 0 ${width} ${height}`, width, height, role: "img", "aria-label": "Priority villages" },
    parts,
  );
}
