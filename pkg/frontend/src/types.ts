/**
 * Wire types for the scenario service.
 *
 * Shapes mirror the canonical report document field for field; table rows
 * stay positional, matching the CSV tables the same data feeds elsewhere.
 */

export type SupplyMode = "potential" | "historical";
export type SolverName = "cycle-canceling" | "successive-shortest-paths";

export interface ScenarioConfig {
  supply_scale: number;
  trader_floor: number;
  clustering: boolean;
  supply_mode: SupplyMode;
  solver: SolverName;
  seed: number;
  high_volume_threshold: number;
}

/** Partial config sent to the service; unset fields take server defaults. */
export type ConfigPatch = Partial<ScenarioConfig>;

export type FlowRow = [village: string, trader: string, trees: number];
export type PermitRow = [trader: string, village: string, trees: number];
export type PriorityRow = [
  village: string,
  optimal: number,
  actual: number,
  delta: number,
  label: string,
];

/** One survival-curve point: how many of the n observations are >= value. */
export type CurvePoint = [value: number, atOrAbove: number];

export interface CurveData {
  n: number;
  points: CurvePoint[];
}

export type ClusterMemberRow = [trader: string, label: string, demand: number, permit: number];
export type ClusterClassRow = [label: string, size: number, mean: string, total: number];

export interface ClusterDoc {
  rows: ClusterMemberRow[];
  classes: ClusterClassRow[];
  pre_cost: number;
  post_cost: number;
}

export interface ResultDoc {
  config: ScenarioConfig;
  costs: { optimized: number; actual: number; ratio: number | null };
  value: number;
  total_supply: number;
  total_demand: number;
  shortfall: number;
  flows: FlowRow[];
  permits: PermitRow[];
  priorities: PriorityRow[];
  curves: Record<string, CurveData>;
  cluster: ClusterDoc | null;
  solve: { augmentations: number; cycles_canceled: number };
  unmet_demand: [trader: string, missing: number][];
  unreachable_pairs: [village: string, trader: string][];
  high_volume_traders: [trader: string, trees: number][];
  warnings: string[];
}

export interface ServiceReport {
  schema_version: string;
  dataset_fingerprint: string;
  display: { actual_tree_km: number; optimized_tree_km: number };
  result: ResultDoc;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobStatus {
  id: string;
  dataset: string;
  state: JobState;
  stage: string | null;
  stages: string[];
  error: string | null;
  config: ScenarioConfig;
}

export interface DatasetSummary {
  villages: number;
  farms: number;
  traders: number;
  transactions: number;
  land_use_types: number;
  yield_source: string;
  od_source: string;
  fingerprint: string;
}

export interface RegisterResponse {
  fingerprint: string;
  already_registered: boolean;
  summary: DatasetSummary;
}

export interface DatasetEntry {
  fingerprint: string;
  path: string;
  summary: DatasetSummary;
}

export type SiteRow = [id: string, x: number, y: number];

export interface SitesDoc {
  fingerprint: string;
  villages: SiteRow[];
  traders: SiteRow[];
}

export interface HealthDoc {
  status: string;
  datasets: number;
  jobs: Record<JobState, number>;
}
