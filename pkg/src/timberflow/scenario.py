"""Declarative what-if runs: supply squeezes, trader floors, clustered permits.

A scenario is a pure function of (dataset bytes, config): the pipeline
resolves supplies and demands, applies the configured adjustments, solves,
and packages costs, flow tables, permits, priorities and survival curves
into a result that serializes to plain JSON types and back without loss.
Wall-clock time never enters the result, so identical runs are identical
byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .clustering import ClusterModel, cluster_traders, moderate_demands
from .dataset import Dataset
from .market import (
    MarketInstance,
    MarketSolution,
    PriorityRow,
    actual_flow_cost,
    build_instance,
    optimize_market,
    permit_schedule,
    priority_villages,
)
from .solver import SOLVER_NAMES, SolverName

SUPPLY_MODES = ("potential", "historical")

#: Traders handling more trees than this get flagged for market-power review.
DEFAULT_HIGH_VOLUME_THRESHOLD = 2000

ProgressFn = Callable[[str], None]


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    """What-if knobs; defaults reproduce the plain optimized baseline."""

    supply_scale: float = 1.0
    trader_floor: int = 0
    clustering: bool = False
    supply_mode: str = "potential"
    solver: SolverName = "cycle-canceling"
    seed: int = 0
    high_volume_threshold: int = DEFAULT_HIGH_VOLUME_THRESHOLD

    def __post_init__(self) -> None:
        if not 0 < self.supply_scale <= 1:
            raise ScenarioError(f"supply_scale must be in (0, 1], got {self.supply_scale}")
        if self.trader_floor < 0:
            raise ScenarioError("trader_floor must be >= 0")
        if self.supply_mode not in SUPPLY_MODES:
            raise ScenarioError(f"supply_mode must be one of {SUPPLY_MODES}")
        if self.solver not in SOLVER_NAMES:
            raise ScenarioError(f"solver must be one of {SOLVER_NAMES}")
        if self.high_volume_threshold < 0:
            raise ScenarioError("high_volume_threshold must be >= 0")

    def to_dict(self) -> dict:
        return {
            "supply_scale": self.supply_scale,
            "trader_floor": self.trader_floor,
            "clustering": self.clustering,
            "supply_mode": self.supply_mode,
            "solver": self.solver,
            "seed": self.seed,
            "high_volume_threshold": self.high_volume_threshold,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScenarioConfig":
        allowed = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - allowed)
        if unknown:
            raise ScenarioError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(**dict(d))


@dataclass(frozen=True)
class SurvivalCurve:
    """S(v) = share of observations >= v, over the distinct observed values."""

    points: tuple[tuple[int, int], ...]  # (value, observations >= value)
    n: int

    def fraction(self, v: int) -> float:
        for value, ge in self.points:
            if value >= v:
                return ge / self.n
        return 0.0

    def mass_at_zero(self) -> float:
        """Share of observations equal to the minimum when that minimum is 0."""
        if not self.points or self.points[0][0] != 0:
            return 0.0
        ge_zero = self.points[0][1]
        ge_one = next((ge for v, ge in self.points if v >= 1), 0)
        return (ge_zero - ge_one) / self.n


def survival_function(values) -> SurvivalCurve:
    vals = sorted(int(v) for v in values)
    if not vals:
        raise ScenarioError("survival function of an empty sample")
    n = len(vals)
    points = []
    seen = set()
    for i, v in enumerate(vals):
        if v not in seen:
            seen.add(v)
            points.append((v, n - i))
    return SurvivalCurve(tuple(points), n)


def apply_supply_reduction(supplies: Mapping[str, int], fraction: float) -> dict[str, int]:
    """Scale every supply by the remaining share, flooring to whole trees."""
    if not 0 < fraction <= 1:
        raise ScenarioError(f"fraction must be in (0, 1], got {fraction}")
    return {v: int(fraction * s) for v, s in supplies.items()}


def apply_trader_floor(demands: Mapping[str, int], floor: int) -> dict[str, int]:
    """Per-trader minimum intake, clamped so no floor exceeds its demand."""
    if floor < 0:
        raise ScenarioError("floor must be >= 0")
    return {t: min(floor, d) for t, d in demands.items()}


@dataclass(frozen=True)
class ClusterReport:
    rows: tuple[tuple[str, str, int, int], ...]  # trader, label, demand, permit
    classes: tuple[tuple[str, int, str, int], ...]  # label, size, exact mean, total
    pre_cost: int
    post_cost: int

    def to_dict(self) -> dict:
        return {
            "rows": [list(r) for r in self.rows],
            "classes": [list(c) for c in self.classes],
            "pre_cost": self.pre_cost,
            "post_cost": self.post_cost,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ClusterReport":
        return cls(
            rows=tuple(tuple(r) for r in d["rows"]),
            classes=tuple(tuple(c) for c in d["classes"]),
            pre_cost=int(d["pre_cost"]),
            post_cost=int(d["post_cost"]),
        )


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    optimized_cost: int
    actual_cost: int
    cost_ratio: float | None
    value: int
    total_supply: int
    total_demand: int
    shortfall: int
    pair_flows: tuple[tuple[str, str, int], ...]
    permits: tuple[tuple[str, str, int], ...]
    priorities: tuple[PriorityRow, ...]
    curves: dict[str, SurvivalCurve]
    cluster: ClusterReport | None
    augmentations: int
    cycles_canceled: int
    unmet_demand: tuple[tuple[str, int], ...]
    unreachable_pairs: tuple[tuple[str, str], ...]
    high_volume_traders: tuple[tuple[str, int], ...]
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "costs": {
                "optimized": self.optimized_cost,
                "actual": self.actual_cost,
                "ratio": self.cost_ratio,
            },
            "value": self.value,
            "total_supply": self.total_supply,
            "total_demand": self.total_demand,
            "shortfall": self.shortfall,
            "flows": [list(r) for r in self.pair_flows],
            "permits": [list(r) for r in self.permits],
            "priorities": [
                [p.village_id, p.optimal_trees, p.actual_trees, p.delta, p.label]
                for p in self.priorities
            ],
            "curves": {
                name: {"n": c.n, "points": [list(p) for p in c.points]}
                for name, c in self.curves.items()
            },
            "cluster": self.cluster.to_dict() if self.cluster else None,
            "solve": {
                "augmentations": self.augmentations,
                "cycles_canceled": self.cycles_canceled,
            },
            "unmet_demand": [list(r) for r in self.unmet_demand],
            "unreachable_pairs": [list(r) for r in self.unreachable_pairs],
            "high_volume_traders": [list(r) for r in self.high_volume_traders],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScenarioResult":
        return cls(
            config=ScenarioConfig.from_dict(d["config"]),
            optimized_cost=int(d["costs"]["optimized"]),
            actual_cost=int(d["costs"]["actual"]),
            cost_ratio=d["costs"]["ratio"],
            value=int(d["value"]),
            total_supply=int(d["total_supply"]),
            total_demand=int(d["total_demand"]),
            shortfall=int(d["shortfall"]),
            pair_flows=tuple((v, t, int(x)) for v, t, x in d["flows"]),
            permits=tuple((t, v, int(x)) for t, v, x in d["permits"]),
            priorities=tuple(
                PriorityRow(v, int(o), int(a), int(dl), lbl)
                for v, o, a, dl, lbl in d["priorities"]
            ),
            curves={
                name: SurvivalCurve(
                    tuple((int(v), int(ge)) for v, ge in c["points"]), int(c["n"])
                )
                for name, c in d["curves"].items()
            },
            cluster=ClusterReport.from_dict(d["cluster"]) if d.get("cluster") else None,
            augmentations=int(d["solve"]["augmentations"]),
            cycles_canceled=int(d["solve"]["cycles_canceled"]),
            unmet_demand=tuple((t, int(u)) for t, u in d["unmet_demand"]),
            unreachable_pairs=tuple((v, t) for v, t in d["unreachable_pairs"]),
            high_volume_traders=tuple((t, int(x)) for t, x in d["high_volume_traders"]),
            warnings=tuple(d["warnings"]),
        )


def _cluster_section(
    inst: MarketInstance,
    model: ClusterModel,
    permits: Mapping[str, int],
    pre: MarketSolution,
    post: MarketSolution,
) -> ClusterReport:
    labels = model.labels
    rows = tuple(
        (t.id, labels[t.id], inst.demands[t.id], permits[t.id]) for t in inst.traders
    )
    classes = tuple(
        (c.label, c.size, str(c.mean), c.total) for c in model.clusters
    )
    return ClusterReport(rows, classes, pre.cost, post.cost)


def run_scenario(
    source: Dataset | MarketInstance,
    cfg: ScenarioConfig,
    progress: ProgressFn | None = None,
) -> ScenarioResult:
    """Execute one what-if configuration end to end."""

    def stage(name: str) -> None:
        if progress is not None:
            progress(name)

    if isinstance(source, Dataset):
        stage("od-matrix")
        inst = build_instance(source)
    else:
        inst = source

    warnings: list[str] = []
    supplies = apply_supply_reduction(inst.supplies(cfg.supply_mode), cfg.supply_scale)
    demands = dict(inst.demands)

    cluster_report = None
    model = None
    permits_map = None
    if cfg.clustering:
        model = cluster_traders(demands)
        permits_map = moderate_demands(model, demands).permits
        effective_demands = dict(permits_map)
    else:
        effective_demands = demands

    floors = None
    if cfg.trader_floor > 0:
        floors = apply_trader_floor(effective_demands, cfg.trader_floor)

    stage("solving")
    sol = optimize_market(
        inst,
        supplies=supplies,
        demands=effective_demands,
        floors=floors,
        method=cfg.solver,
    )
    if cfg.clustering:
        pre = optimize_market(
            inst, supplies=supplies, demands=demands, floors=None, method=cfg.solver
        )
        cluster_report = _cluster_section(inst, model, permits_map, pre, sol)

    stage("reporting")
    _, actual_cost = actual_flow_cost(inst)
    if actual_cost == 0:
        warnings.append("historical transactions are empty or cost nothing")
    ratio = sol.cost / actual_cost if actual_cost > 0 else None

    total_supply = sum(supplies.values())
    total_demand = sum(effective_demands.values())
    intake = {t: sol.trader_totals.get(t, 0) for t in effective_demands}
    if total_supply >= total_demand and not floors:
        # with enough supply the optimizer must fill every demand exactly
        assert all(intake[t] == d for t, d in effective_demands.items())
    unmet = tuple(
        (t, d - intake[t]) for t, d in effective_demands.items() if intake[t] < d
    )
    shortfall = max(0, total_demand - sol.value)
    if shortfall:
        warnings.append(
            f"supply shortfall: {shortfall} trees of demand unmet across "
            f"{len(unmet)} trader(s)"
        )
    unreachable = tuple(inst.unreachable_pairs())
    if unreachable:
        warnings.append(f"{len(unreachable)} village-trader pair(s) unreachable by road")
    high = tuple(
        (t.id, inst.demands[t.id])
        for t in inst.traders
        if inst.demands[t.id] > cfg.high_volume_threshold
    )
    if high:
        warnings.append(
            f"{len(high)} trader(s) above the {cfg.high_volume_threshold}-tree volume threshold"
        )

    curves = {
        "trader_demand": survival_function(list(inst.demands.values())),
        "trader_intake": survival_function([intake[t] for t in effective_demands]),
    }
    if inst.transactions:
        curves["transaction_trees"] = survival_function(
            [t.trees_harvested for t in inst.transactions]
        )

    return ScenarioResult(
        config=cfg,
        optimized_cost=sol.cost,
        actual_cost=actual_cost,
        cost_ratio=ratio,
        value=sol.value,
        total_supply=total_supply,
        total_demand=total_demand,
        shortfall=shortfall,
        pair_flows=sol.pair_flows,
        permits=permit_schedule(sol),
        priorities=priority_villages(inst, sol),
        curves=curves,
        cluster=cluster_report,
        augmentations=sol.result.stats.augmentations,
        cycles_canceled=sol.result.stats.cycles_canceled,
        unmet_demand=unmet,
        unreachable_pairs=unreachable,
        high_volume_traders=high,
        warnings=tuple(warnings),
    )
