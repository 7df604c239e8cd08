/**
 * View assembly: one completed report becomes cards of markup; several
 * pinned reports become the shared-axis comparison. Every quantity comes
 * straight from the report document: the client adds percentages and
 * layout, never recomputed flows, costs or curves.
 */

import {
  HISTORICAL_COLOR,
  SERIES_COLORS,
  costBarsSvg,
  priorityMapSvg,
  survivalOverlaySvg,
  type CostBar,
  type CurveSeries,
} from "./charts.js";
import { esc, fmtNum, pct } from "./svg.js";
import { clusterSectionHtml, permitTableHtml, priorityTableHtml, warningsHtml } from "./tables.js";
import type { PinnedResult } from "./pins.js";
import type { ServiceReport, SitesDoc } from "./types.js";

const kmText = (treeKmValue: number) => `${fmtNum(treeKmValue)} tree-km`;

/** (actual - optimized) / actual, as a percentage; null when actual is zero. */
export function costReductionPct(report: ServiceReport): number | null {
  const { actual, optimized } = report.result.costs;
  if (actual <= 0) return null;
  return ((actual - optimized) / actual) * 100;
}

export interface ReportView {
  label: string;
  costCard: string;
  survival: string;
  permitTable: string;
  priorityTable: string;
  priorityCounts: Record<string, number>;
  priorityMap: string | null;
  clusterSection: string | null;
  warnings: string;
  headline: string;
}

function priorityLabels(report: ServiceReport): Map<string, string> {
  return new Map(report.result.priorities.map(([village, , , , label]) => [village, label]));
}

function countLabels(report: ServiceReport): Record<string, number> {
  const counts: Record<string, number> = {};
  for (const [, , , , label] of report.result.priorities) {
    counts[label] = (counts[label] ?? 0) + 1;
  }
  return counts;
}

export interface ViewOptions {
  label?: string;
  /** planar coordinates from the sites endpoint; enables the map view */
  sites?: SitesDoc;
}

/** The single-result layout. */
export function reportView(report: ServiceReport, opts: ViewOptions = {}): ReportView {
  const label = opts.label ?? "Scenario";
  const r = report.result;
  const bars: CostBar[] = [
    {
      label: "Historical",
      cost: r.costs.actual,
      display: kmText(report.display.actual_tree_km),
      color: HISTORICAL_COLOR,
    },
    {
      label,
      cost: r.costs.optimized,
      display: kmText(report.display.optimized_tree_km),
      color: SERIES_COLORS[0],
    },
  ];
  const reduction = costReductionPct(report);
  const headline =
    reduction === null ? "" : `cost reduction of ${pct(reduction)} against the historical flows`;
  const costCard =
    `<div class="cost-card">${costBarsSvg(bars)}` +
    (headline ? `<p class="headline">${esc(headline)}</p>` : "") +
    `</div>`;

  const series: CurveSeries[] = [];
  if (r.curves.trader_demand) {
    series.push({
      label: "demand",
      curve: r.curves.trader_demand,
      color: HISTORICAL_COLOR,
      dashed: true,
    });
  }
  if (r.curves.trader_intake) {
    series.push({ label: "intake", curve: r.curves.trader_intake, color: SERIES_COLORS[0] });
  }
  if (r.curves.transaction_trees) {
    series.push({
      label: "historical transactions",
      curve: r.curves.transaction_trees,
      color: "#b8a27a",
      dashed: true,
    });
  }
  const survival = survivalOverlaySvg(series, { xLabel: "trees" });

  const sites = opts.sites;
  const priorityMap =
    sites && sites.fingerprint === report.dataset_fingerprint
      ? priorityMapSvg(sites.villages, priorityLabels(report), { traders: sites.traders })
      : null;

  return {
    label,
    costCard,
    survival,
    permitTable: permitTableHtml(r.permits),
    priorityTable: priorityTableHtml(r.priorities),
    priorityCounts: countLabels(report),
    priorityMap,
    clusterSection: r.cluster ? clusterSectionHtml(r.cluster) : null,
    warnings: warningsHtml(r.warnings),
    headline,
  };
}

export interface ComparisonDelta {
  label: string;
  /** percentage change of this pin's optimized cost against the first pin */
  vsFirstPct: number | null;
  /** percentage saved against the dataset's historical cost */
  reductionPct: number | null;
}

export interface ComparisonView {
  costBars: string;
  deltas: ComparisonDelta[];
  survivalOverlay: string;
  permitTable: string;
  permitLabel: string;
  priorityTable: string;
  priorityMap: string | null;
  clusterSection: string | null;
  warnings: string;
}

export type ScreenView =
  | { mode: "empty" }
  | { mode: "single"; view: ReportView }
  | { mode: "comparison"; view: ComparisonView }
  | { mode: "blocked"; reason: string };

/**
 * The shared-axis comparison across pinned results: one historical bar,
 * one optimized bar per pin, every pin's intake curve over the first pin's
 * demand curve. Tables and the map show the most recent pin.
 */
export function comparisonView(pins: readonly PinnedResult[], opts: ViewOptions = {}): ComparisonView {
  if (pins.length < 1) throw new Error("comparison needs at least one pinned result");
  const first = pins[0];
  const mismatched = pins.find((p) => p.fingerprint !== first.fingerprint);
  if (mismatched) {
    throw new Error(
      `pinned results span different datasets (${first.fingerprint.slice(0, 12)}… vs ` +
        `${mismatched.fingerprint.slice(0, 12)}…); comparisons must share one dataset`,
    );
  }

  const bars: CostBar[] = [
    {
      label: "Historical",
      cost: first.report.result.costs.actual,
      display: kmText(first.report.display.actual_tree_km),
      color: HISTORICAL_COLOR,
    },
    ...pins.map((pin, i) => ({
      label: pin.label,
      cost: pin.report.result.costs.optimized,
      display: kmText(pin.report.display.optimized_tree_km),
      color: SERIES_COLORS[i % SERIES_COLORS.length],
    })),
  ];

  const firstCost = first.report.result.costs.optimized;
  const deltas: ComparisonDelta[] = pins.map((pin) => ({
    label: pin.label,
    vsFirstPct:
      firstCost > 0 ? ((pin.report.result.costs.optimized - firstCost) / firstCost) * 100 : null,
    reductionPct: costReductionPct(pin.report),
  }));

  const series: CurveSeries[] = [];
  const demand = first.report.result.curves.trader_demand;
  if (demand) {
    series.push({ label: "demand", curve: demand, color: HISTORICAL_COLOR, dashed: true });
  }
  pins.forEach((pin, i) => {
    const intake = pin.report.result.curves.trader_intake;
    if (intake) {
      series.push({
        label: pin.label,
        curve: intake,
        color: SERIES_COLORS[i % SERIES_COLORS.length],
      });
    }
  });

  const latest = pins[pins.length - 1];
  const latestView = reportView(latest.report, { label: latest.label, sites: opts.sites });

  return {
    costBars: costBarsSvg(bars),
    deltas,
    survivalOverlay: survivalOverlaySvg(series, { xLabel: "trees per trader" }),
    permitTable: latestView.permitTable,
    permitLabel: latest.label,
    priorityTable: latestView.priorityTable,
    priorityMap: latestView.priorityMap,
    clusterSection: latestView.clusterSection,
    warnings: latestView.warnings,
  };
}

/** Dispatch on how many results are pinned; single results get no chrome. */
export function screenView(pins: readonly PinnedResult[], opts: ViewOptions = {}): ScreenView {
  if (!pins.length) return { mode: "empty" };
  if (pins.length === 1) {
    return { mode: "single", view: reportView(pins[0].report, { ...opts, label: pins[0].label }) };
  }
  try {
    return { mode: "comparison", view: comparisonView(pins, opts) };
  } catch (err) {
    return { mode: "blocked", reason: err instanceof Error ? err.message : String(err) };
  }
}

/** Inline failure card; the service's own message, shown verbatim. */
export function errorCardHtml(label: string, message: string): string {
  return `<div class="error-card"><strong>${esc(label)}</strong> failed: ${esc(message)}</div>`;
}
