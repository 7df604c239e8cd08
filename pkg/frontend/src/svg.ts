/**
 * Small SVG and formatting helpers shared by the hand-rolled charts.
 * No chart library: the views are a handful of rects, polylines and text.
 */

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function esc(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch]);
}

export type Attrs = Record<string, string | number>;

export function el(name: string, attrs: Attrs, children?: string | string[]): string {
  const attrText = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? trim(v) : esc(v)}"`)
    .join("");
  if (children === undefined) return `<${name}${attrText}/>`;
  const inner = Array.isArray(children) ? children.join("") : children;
  return `<${name}${attrText}>${inner}</${name}>`;
}

/** Fixed-precision coordinate text so markup stays stable and compact. */
export function trim(n: number): string {
  const fixed = n.toFixed(2);
  return fixed.replace(/\.?0+$/, "") || "0";
}

export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (x: number) => number {
  const span = d1 - d0 || 1;
  return (x) => r0 + ((x - d0) / span) * (r1 - r0);
}

/** Round tick positions from 0 to max, stepping by 1/2/5 times a power of ten. */
export function ticks(max: number, count = 5): number[] {
  if (max <= 0) return [0];
  const raw = max / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => max / s <= count) ?? 10 * mag;
  const out: number[] = [];
  for (let v = 0; v <= max + step * 1e-9; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

/** 1234567 -> "1,234,567"; keeps any fractional digits as they are. */
export function fmtNum(n: number): string {
  const [int, frac] = String(n).split(".");
  const grouped = int.replace(/\B(?=(\d{3})+(?!\d))/g, ",");
  return frac !== undefined ? `${grouped}.${frac}` : grouped;
}

/** Display tree-metres in tree-km, the unit every view shares. */
export function treeKm(metres: number): string {
  return `${fmtNum(metres / 1000)} tree-km`;
}

/** One decimal place, for percentages. */
export function pct(x: number): string {
  return `${x.toFixed(1)}%`;
}
