/**
 * HTML table builders for permit schedules, priority villages and cluster
 * classes. Plain strings, escaped; the styling lives in the stylesheet.
 */

import { esc, fmtNum, treeKm } from "./svg.js";
import type { ClusterDoc, PermitRow, PriorityRow } from "./types.js";

function table(cls: string, head: string[], rows: string[], foot?: string): string {
  const thead = `<thead><tr>${head.map((h) => `<th>${esc(h)}</th>`).join("")}</tr></thead>`;
  const tfoot = foot ? `<tfoot><tr><td colspan="${head.length}">${esc(foot)}</td></tr></tfoot>` : "";
  return `<table class="${cls}">${thead}<tbody>${rows.join("")}</tbody>${tfoot}</table>`;
}

function cells(values: (string | number)[]): string {
  return `<tr>${values
    .map((v) => (typeof v === "number" ? `<td class="num">${fmtNum(v)}</td>` : `<td>${esc(v)}</td>`))
    .join("")}</tr>`;
}

/** Per-trader, per-village harvest allocations from the optimized flow. */
export function permitTableHtml(permits: PermitRow[], limit = Infinity): string {
  const shown = permits.slice(0, limit);
  const rows = shown.map(([trader, village, trees]) => cells([trader, village, trees]));
  const foot =
    permits.length > shown.length
      ? `… and ${permits.length - shown.length} more permits`
      : undefined;
  return table("permits", ["trader", "village", "trees"], rows, foot);
}

export function priorityTableHtml(priorities: PriorityRow[], limit = Infinity): string {
  const shown = priorities.slice(0, limit);
  const rows = shown.map(
    ([village, optimal, actual, delta, label]) =>
      `<tr class="${esc(label)}">${[
        `<td>${esc(village)}</td>`,
        `<td class="num">${fmtNum(optimal)}</td>`,
        `<td class="num">${fmtNum(actual)}</td>`,
        `<td class="num">${fmtNum(delta)}</td>`,
        `<td>${esc(label)}</td>`,
      ].join("")}</tr>`,
  );
  const foot =
    priorities.length > shown.length
      ? `… and ${priorities.length - shown.length} more villages`
      : undefined;
  return table(
    "priorities",
    ["village", "optimal trees", "actual trees", "delta", "class"],
    rows,
    foot,
  );
}

/** The five demand classes with their uniform permits, plus both solve costs. */
export function clusterSectionHtml(cluster: ClusterDoc): string {
  const classRows = cluster.classes.map(([label, size, mean, total]) =>
    cells([label, size, mean, total]),
  );
  const classTable = table(
    "cluster-classes",
    ["class", "traders", "mean demand", "total permit"],
    classRows,
  );
  const costs =
    `<p class="cluster-costs">exact demands ${treeKm(cluster.pre_cost)} → ` +
    `moderated permits ${treeKm(cluster.post_cost)}</p>`;
  return `<section class="cluster">${costs}${classTable}</section>`;
}

export function warningsHtml(warnings: string[]): string {
  if (!warnings.length) return "";
  return `<ul class="warnings">${warnings.map((w) => `<li>${esc(w)}</li>`).join("")}</ul>`;
}
