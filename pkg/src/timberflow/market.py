"""Bipartite village-trader market: supplies, demands, costs, and reports.

Distances enter as integer metres from the OD matrix and costs stay in
integer tree-metres end to end; conversion to tree-kilometres happens only
at display time.  Village supply aggregates farm areas against per-type
yields and is floored to whole trees so potential supply is never
overstated.  Trader demand is the total of historically harvested trees.

Network nodes are namespaced ("v:" and "t:" prefixes) so a village and a
trader may share a raw id without colliding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .dataset import Dataset, Farm, Trader, Transaction, Village, trader_sites, village_sites
from .network import Edge, FlowNetwork
from .roads import UNREACHABLE, ODMatrix, natural_key, od_cost_matrix
from .solver import SolveResult, SolverName, solve_market

#: Tolerance added before flooring yield sums; absorbs float dust like
#: 29.999999999999996 without ever granting a full extra tree.
_FLOOR_EPS = 1e-9

PLANT_PRIORITY = "plant-priority"
SATISFIED = "satisfied"


class MarketError(ValueError):
    pass


def village_node(village_id: str) -> str:
    return f"v:{village_id}"


def trader_node(trader_id: str) -> str:
    return f"t:{trader_id}"


@dataclass(frozen=True)
class MarketInstance:
    """A solvable market: entities plus a resolved yield table and OD matrix."""

    villages: tuple[Village, ...]
    farms: tuple[Farm, ...]
    traders: tuple[Trader, ...]
    transactions: tuple[Transaction, ...]
    yields: Mapping[str, float]
    od: ODMatrix

    @cached_property
    def farms_by_village(self) -> dict[str, tuple[Farm, ...]]:
        out: dict[str, list[Farm]] = {v.id: [] for v in self.villages}
        for f in self.farms:
            out[f.village_id].append(f)
        return {vid: tuple(fs) for vid, fs in out.items()}

    @cached_property
    def potential_supplies(self) -> dict[str, int]:
        return {
            v.id: village_supply(self.farms_by_village[v.id], self.yields)
            for v in self.villages
        }

    @cached_property
    def historical_pair_flows(self) -> dict[tuple[str, str], int]:
        return aggregate_pair_flows(self.transactions)

    @cached_property
    def historical_supplies(self) -> dict[str, int]:
        out = {v.id: 0 for v in self.villages}
        for t in self.transactions:
            out[t.village_id] += t.trees_harvested
        return out

    @cached_property
    def demands(self) -> dict[str, int]:
        out = {t.id: 0 for t in self.traders}
        for t in self.transactions:
            out[t.trader_id] += t.trees_harvested
        return out

    def supplies(self, mode: str = "potential") -> dict[str, int]:
        if mode == "potential":
            return dict(self.potential_supplies)
        if mode == "historical":
            return dict(self.historical_supplies)
        raise MarketError(f"unknown supply mode {mode!r}")

    def unreachable_pairs(self) -> list[tuple[str, str]]:
        return self.od.unreachable_pairs()


def compute_yield_table(
    farms: Iterable[Farm], transactions: Iterable[Transaction]
) -> dict[str, float]:
    """Per land-use type, the mean over farms of harvested trees per hectare.

    Only farm-attributed transactions contribute; farms with no recorded
    harvest count at zero, which biases yields low rather than high.
    """
    farms = list(farms)
    if not farms:
        raise MarketError("cannot estimate yields without farms")
    harvested: dict[str, int] = {f.id: 0 for f in farms}
    for t in transactions:
        if t.farm_id is not None:
            if t.farm_id not in harvested:
                raise MarketError(f"transaction {t.id!r} references unknown farm {t.farm_id!r}")
            harvested[t.farm_id] += t.trees_harvested
    by_type: dict[str, list[float]] = {}
    for f in farms:
        if f.area_ha <= 0:
            raise MarketError(f"farm {f.id!r} has non-positive area")
        by_type.setdefault(f.land_use_type, []).append(harvested[f.id] / f.area_ha)
    return {lut: sum(rates) / len(rates) for lut, rates in sorted(by_type.items())}


def village_supply(farms: Iterable[Farm], yields: Mapping[str, float]) -> int:
    """Potential supply in whole trees: floor of sum(yield[type] * area)."""
    total = 0.0
    for f in farms:
        if f.land_use_type not in yields:
            raise MarketError(f"no yield entry for land_use_type {f.land_use_type!r}")
        total += yields[f.land_use_type] * f.area_ha
    return int(total + _FLOOR_EPS)


def trader_demand(trader_id: str, transactions: Iterable[Transaction]) -> int:
    return sum(t.trees_harvested for t in transactions if t.trader_id == trader_id)


def aggregate_pair_flows(transactions: Iterable[Transaction]) -> dict[tuple[str, str], int]:
    """Village-trader tree totals over a transaction history, insertion-ordered."""
    pairs: dict[tuple[str, str], int] = {}
    for t in transactions:
        key = (t.village_id, t.trader_id)
        pairs[key] = pairs.get(key, 0) + t.trees_harvested
    return pairs


def build_instance(ds: Dataset) -> MarketInstance:
    """Resolve a loaded dataset into a solvable instance.

    The yield table comes from yields.csv or, failing that, is estimated
    from farm-attributed transactions.  The OD matrix comes from
    od_matrix.csv or is computed over the road network.
    """
    if ds.yields is not None:
        yields = dict(ds.yields)
    elif ds.has_farm_attribution:
        yields = compute_yield_table(ds.farms, ds.transactions)
    else:
        raise MarketError(
            "dataset has no yields.csv and no farm-attributed transactions; "
            "cannot estimate per-type yields"
        )
    if ds.od is not None:
        od = ds.od
    elif ds.roads is not None:
        od = od_cost_matrix(village_sites(ds), trader_sites(ds), ds.roads)
    else:
        raise MarketError("dataset provides neither od_matrix.csv nor roads.csv")
    return MarketInstance(ds.villages, ds.farms, ds.traders, ds.transactions, yields, od)


def actual_flow_cost(
    inst: MarketInstance, weight: str = "trees"
) -> tuple[dict[tuple[str, str], int], int]:
    """Historical flow table and its cost in tree-metres.

    ``weight="trees"`` prices each pair as distance x trees moved;
    ``weight="transactions"`` prices distance x number of transactions,
    for sensitivity checks.
    """
    if weight == "trees":
        pairs = dict(inst.historical_pair_flows)
    elif weight == "transactions":
        pairs = {}
        for t in inst.transactions:
            key = (t.village_id, t.trader_id)
            pairs[key] = pairs.get(key, 0) + 1
    else:
        raise MarketError(f"unknown weight {weight!r}")
    cost = 0
    for (v, t), units in pairs.items():
        d = inst.od.distance(v, t)
        if d == UNREACHABLE:
            raise MarketError(f"transacting pair ({v!r}, {t!r}) is unreachable in the OD matrix")
        cost += d * units
    return pairs, cost


def build_market_network(
    supplies: Mapping[str, int],
    demands: Mapping[str, int],
    od: ODMatrix,
) -> FlowNetwork:
    """Bipartite flow network over every finite OD pair.

    Edge capacity min(supply, demand) never binds on this single-hop
    topology but keeps all integers bounded by the problem data.
    Unreachable pairs simply get no edge; callers report them separately.
    """
    for vid, s in supplies.items():
        if s < 0:
            raise MarketError(f"negative supply for village {vid!r}")
    for tid, d in demands.items():
        if d < 0:
            raise MarketError(f"negative demand for trader {tid!r}")
    nodes = [village_node(v) for v in supplies] + [trader_node(t) for t in demands]
    balances = {village_node(v): s for v, s in supplies.items()}
    balances.update({trader_node(t): -d for t, d in demands.items()})
    edges = []
    for vid, s in supplies.items():
        for tid, d in demands.items():
            dist = inst_distance(od, vid, tid)
            if dist == UNREACHABLE:
                continue
            edges.append(Edge(village_node(vid), trader_node(tid), min(s, d), 0, dist))
    return FlowNetwork(nodes, edges, balances)


def inst_distance(od: ODMatrix, village_id: str, trader_id: str) -> int:
    try:
        return od.distance(village_id, trader_id)
    except KeyError:
        raise MarketError(
            f"OD matrix has no entry for pair ({village_id!r}, {trader_id!r})"
        ) from None


@dataclass(frozen=True)
class MarketSolution:
    """Optimized market flow; ``pair_flows`` lists positive flows only."""

    pair_flows: tuple[tuple[str, str, int], ...]
    value: int
    cost: int
    result: SolveResult

    @cached_property
    def village_totals(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v, _, x in self.pair_flows:
            out[v] = out.get(v, 0) + x
        return out

    @cached_property
    def trader_totals(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for _, t, x in self.pair_flows:
            out[t] = out.get(t, 0) + x
        return out


def optimize_market(
    inst: MarketInstance,
    supplies: Mapping[str, int] | None = None,
    demands: Mapping[str, int] | None = None,
    floors: Mapping[str, int] | None = None,
    method: SolverName = "cycle-canceling",
) -> MarketSolution:
    """Minimum-cost assignment of villages to traders.

    ``supplies``/``demands`` default to the instance's potential supplies
    and historical demands; scenario code passes adjusted vectors.  Zero
    flows are dropped from the reported table, leaving the consolidated
    network.
    """
    if supplies is None:
        supplies = inst.potential_supplies
    if demands is None:
        demands = inst.demands
    net = build_market_network(supplies, demands, inst.od)
    node_floors = (
        {trader_node(t): fl for t, fl in floors.items() if fl > 0} if floors else None
    )
    result = solve_market(net, floors=node_floors, method=method)
    pair_flows = tuple(
        (e.tail[2:], e.head[2:], x)
        for e, x in zip(net.edges, result.flow.values)
        if x > 0
    )
    return MarketSolution(pair_flows, result.value, result.cost, result)


def permit_schedule(sol: MarketSolution) -> tuple[tuple[str, str, int], ...]:
    """(trader, village, permitted trees) rows, sorted for stable output."""
    rows = [(t, v, x) for v, t, x in sol.pair_flows]
    rows.sort(key=lambda r: (natural_key(r[0]), natural_key(r[1])))
    return tuple(rows)


@dataclass(frozen=True, slots=True)
class PriorityRow:
    village_id: str
    optimal_trees: int
    actual_trees: int
    delta: int
    label: str


def priority_villages(
    inst: MarketInstance, sol: MarketSolution
) -> tuple[PriorityRow, ...]:
    """Per-village planting priorities in dataset order.

    A village whose optimal outflow exceeds its historical harvest should
    be planted up (delta > 0); others are satisfied.  Uprooting is treated
    as uniform across villages, so it cancels out of the comparison.
    """
    rows = []
    for v in inst.villages:
        optimal = sol.village_totals.get(v.id, 0)
        actual = inst.historical_supplies.get(v.id, 0)
        delta = optimal - actual
        rows.append(
            PriorityRow(v.id, optimal, actual, delta, PLANT_PRIORITY if delta > 0 else SATISFIED)
        )
    return tuple(rows)


def tree_km(cost_tree_m: int) -> float:
    """Display conversion from integer tree-metres to tree-kilometres."""
    return cost_tree_m / 1000.0
