/**
 * Scenario form state: raw field text plus validation.
 *
 * Fields hold what the user typed; parsing happens per keystroke so the
 * submit button can stay disabled until every field is valid. Messages from
 * the service (say, an infeasible floor) are shown verbatim elsewhere; the
 * checks here only guard the obvious client-side ranges.
 */

import type { ConfigPatch, ScenarioConfig } from "./types.js";

export const SUPPLY_MODES = ["potential", "historical"] as const;
export const SOLVERS = ["cycle-canceling", "successive-shortest-paths"] as const;

export interface ScenarioFormState {
  supplyScale: string;
  traderFloor: string;
  clustering: boolean;
  supplyMode: string;
  solver: string;
  seed: string;
  highVolumeThreshold: string;
}

export const CONFIG_DEFAULTS: ScenarioConfig = {
  supply_scale: 1.0,
  trader_floor: 0,
  clustering: false,
  supply_mode: "potential",
  solver: "cycle-canceling",
  seed: 0,
  high_volume_threshold: 2000,
};

export function defaultForm(): ScenarioFormState {
  return {
    supplyScale: "1",
    traderFloor: "0",
    clustering: false,
    supplyMode: "potential",
    solver: "cycle-canceling",
    seed: "0",
    highVolumeThreshold: "2000",
  };
}

export type FormErrors = Partial<Record<keyof ScenarioFormState, string>>;

function parseNumber(raw: string): number | null {
  const trimmed = raw.trim();
  if (!/^-?(\d+\.?\d*|\.\d+)$/.test(trimmed)) return null;
  return Number(trimmed);
}

function parseInteger(raw: string): number | null {
  const n = parseNumber(raw);
  return n !== null && Number.isInteger(n) ? n : null;
}

export function fieldErrors(form: ScenarioFormState): FormErrors {
  const errors: FormErrors = {};
  const scale = parseNumber(form.supplyScale);
  if (scale === null || !(scale > 0 && scale <= 1)) {
    errors.supplyScale = "supply scale must be a number in (0, 1]";
  }
  const floor = parseInteger(form.traderFloor);
  if (floor === null || floor < 0) {
    errors.traderFloor = "trader floor must be a whole number of trees, 0 or more";
  }
  const seed = parseInteger(form.seed);
  if (seed === null || seed < 0) {
    errors.seed = "seed must be a non-negative integer";
  }
  const threshold = parseInteger(form.highVolumeThreshold);
  if (threshold === null || threshold < 0) {
    errors.highVolumeThreshold = "high-volume threshold must be a non-negative integer";
  }
  if (!(SUPPLY_MODES as readonly string[]).includes(form.supplyMode)) {
    errors.supplyMode = `supply mode must be one of: ${SUPPLY_MODES.join(", ")}`;
  }
  if (!(SOLVERS as readonly string[]).includes(form.solver)) {
    errors.solver = `solver must be one of: ${SOLVERS.join(", ")}`;
  }
  return errors;
}

export function canSubmit(form: ScenarioFormState): boolean {
  return Object.keys(fieldErrors(form)).length === 0;
}

/** Parse a valid form into the config payload the service expects. */
export function formConfig(form: ScenarioFormState): ScenarioConfig {
  const errors = fieldErrors(form);
  const first = Object.values(errors)[0];
  if (first) throw new Error(first);
  return {
    supply_scale: Number(form.supplyScale),
    trader_floor: Number(form.traderFloor),
    clustering: form.clustering,
    supply_mode: form.supplyMode as ScenarioConfig["supply_mode"],
    solver: form.solver as ScenarioConfig["solver"],
    seed: Number(form.seed),
    high_volume_threshold: Number(form.highVolumeThreshold),
  };
}

export interface Preset {
  name: string;
  config: ConfigPatch;
}

export const PRESETS: readonly Preset[] = [
  { name: "Baseline", config: {} },
  { name: "Clustered permits", config: { clustering: true } },
  { name: "Supply −25%", config: { supply_scale: 0.75 } },
];

export function applyPreset(preset: Preset): ScenarioFormState {
  const form = defaultForm();
  const c = preset.config;
  if (c.supply_scale !== undefined) form.supplyScale = String(c.supply_scale);
  if (c.trader_floor !== undefined) form.traderFloor = String(c.trader_floor);
  if (c.clustering !== undefined) form.clustering = c.clustering;
  if (c.supply_mode !== undefined) form.supplyMode = c.supply_mode;
  if (c.solver !== undefined) form.solver = c.solver;
  if (c.seed !== undefined) form.seed = String(c.seed);
  if (c.high_volume_threshold !== undefined) {
    form.highVolumeThreshold = String(c.high_volume_threshold);
  }
  return form;
}

/**
 * Human label for a run, built from the knobs that differ from defaults:
 * {supply_scale: 0.75} reads "Supply reduced by 25%", the default config
 * reads "Baseline".
 */
export function describeConfig(config: ConfigPatch): string {
  const parts: string[] = [];
  if (config.supply_scale !== undefined && config.supply_scale < 1) {
    parts.push(`Supply reduced by ${Math.round((1 - config.supply_scale) * 100)}%`);
  }
  if (config.clustering) parts.push("Clustered permits");
  if (config.trader_floor !== undefined && config.trader_floor > 0) {
    parts.push(`Floor ${config.trader_floor} trees per trader`);
  }
  if (config.supply_mode === "historical") parts.push("Historical supplies");
  return parts.length ? parts.join(", ") : "Baseline";
}
