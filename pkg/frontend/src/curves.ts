/**
 * Survival-curve geometry.
 *
 * A curve arrives as sorted (value, count-at-or-above) points over n
 * observations. The survival fraction S(v) is constant at points[i]'s
 * fraction on the half-open interval (points[i-1].value, points[i].value],
 * so each horizontal segment sits at the level of the point it leads into.
 * The drawn path therefore never rises above the data: no interpolation.
 */

import type { CurveData } from "./types.js";

export type Vertex = [x: number, y: number];

/**
 * Polyline vertices of the survival step function in (value, fraction)
 * space, extended left to x=0 and right to xMax at zero.
 */
export function stepVertices(curve: CurveData, xMax?: number): Vertex[] {
  const pts = curve.points;
  if (!pts.length || curve.n <= 0) return [];
  const frac = (c: number) => c / curve.n;
  const out: Vertex[] = [];
  const push = (x: number, y: number) => {
    const last = out[out.length - 1];
    if (!last || last[0] !== x || last[1] !== y) out.push([x, y]);
  };
  push(0, frac(pts[0][1]));
  for (let i = 0; i < pts.length; i++) {
    const [v, c] = pts[i];
    push(v, frac(c));
    const next = i + 1 < pts.length ? frac(pts[i + 1][1]) : 0;
    push(v, next);
  }
  const lastValue = pts[pts.length - 1][0];
  if (xMax !== undefined && xMax > lastValue) push(xMax, 0);
  return out;
}

/** Survival fraction at v: share of observations with value >= v. */
export function fractionAtOrAbove(curve: CurveData, v: number): number {
  for (const [value, count] of curve.points) {
    if (value >= v) return count / curve.n;
  }
  return 0;
}

/**
 * Observations with value exactly zero, read off the curve: the drop from
 * the point at zero to the first positive-valued point.
 */
export function zeroCount(curve: CurveData): number {
  if (!curve.points.length || curve.points[0][0] !== 0) return 0;
  const positive = curve.points.find(([v]) => v > 0);
  return curve.n - (positive ? positive[1] : 0);
}

export function massAtZero(curve: CurveData): number {
  return curve.n > 0 ? zeroCount(curve) / curve.n : 0;
}

/** Largest observed value across curves; the shared x extent of an overlay. */
export function maxValue(curves: CurveData[]): number {
  let max = 0;
  for (const c of curves) {
    if (c.points.length) max = Math.max(max, c.points[c.points.length - 1][0]);
  }
  return max;
}
