"""Integer flow networks: data model, transforms, validation, costing.

Conventions used throughout the package:

* A node balance b(i) > 0 marks a supply node (it may send up to b(i) units),
  b(i) < 0 marks a demand node (it may absorb up to -b(i)), and b(i) == 0
  requires exact conservation.
* Edges are directed and identified by their position in the edge tuple;
  parallel edges are permitted.  Each edge carries integer capacity, integer
  lower bound and an integer cost per unit of flow.
* Costs are integer "millidistance" units, i.e. metres when distances come
  from kilometre-scale inputs, so every optimization runs in exact integer
  arithmetic (Python integers never overflow, so cost sums are exact).
* All orderings (nodes, edges, residual arcs) are deterministic and
  documented, which is what makes solver output reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

NodeId = Hashable

#: Reserved node ids introduced by build_st_transform.
SOURCE = "__source__"
SINK = "__sink__"


class NetworkError(ValueError):
    """Structural problem in a network definition."""


class FlowError(ValueError):
    """A flow is incompatible with, or infeasible for, its network."""


@dataclass(frozen=True, slots=True)
class Edge:
    """Directed edge with integer capacity bounds and per-unit cost."""

    tail: NodeId
    head: NodeId
    capacity: int
    lower_bound: int = 0
    cost: int = 0


@dataclass(frozen=True)
class FlowNetwork:
    """Immutable directed network with node balances.

    ``nodes`` fixes the deterministic node order; ``edges`` fixes edge ids
    (stable positional indices).  ``balances`` maps node id to b(i); missing
    nodes default to 0.
    """

    nodes: tuple[NodeId, ...]
    edges: tuple[Edge, ...]
    balances: Mapping[NodeId, int]

    def __init__(
        self,
        nodes: Iterable[NodeId],
        edges: Iterable[Edge],
        balances: Mapping[NodeId, int] | None = None,
    ) -> None:
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "balances", dict(balances or {}))
        self._validate()

    def _validate(self) -> None:
        seen = set()
        for n in self.nodes:
            if n in seen:
                raise NetworkError(f"duplicate node id {n!r}")
            seen.add(n)
        for i, e in enumerate(self.edges):
            if e.tail not in seen or e.head not in seen:
                raise NetworkError(f"edge {i}: endpoint not in node set ({e.tail!r} -> {e.head!r})")
            if e.tail == e.head:
                raise NetworkError(f"edge {i}: self-loop at {e.tail!r}")
            if not (0 <= e.lower_bound <= e.capacity):
                raise NetworkError(
                    f"edge {i}: bounds must satisfy 0 <= lower {e.lower_bound} <= capacity {e.capacity}"
                )
        for n in self.balances:
            if n not in seen:
                raise NetworkError(f"balance given for unknown node {n!r}")

    # -- deterministic lookups ------------------------------------------------

    @cached_property
    def node_index(self) -> dict[NodeId, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    def balance(self, node: NodeId) -> int:
        return self.balances.get(node, 0)

    @cached_property
    def total_supply(self) -> int:
        return sum(b for b in self.balances.values() if b > 0)

    @cached_property
    def total_demand(self) -> int:
        return -sum(b for b in self.balances.values() if b < 0)

    @cached_property
    def has_lower_bounds(self) -> bool:
        return any(e.lower_bound > 0 for e in self.edges)

    def with_balances(self, balances: Mapping[NodeId, int]) -> "FlowNetwork":
        return FlowNetwork(self.nodes, self.edges, balances)


@dataclass(frozen=True)
class Flow:
    """Per-edge integer flow, index-aligned with its network's edges."""

    values: tuple[int, ...]

    def __init__(self, values: Iterable[int]) -> None:
        object.__setattr__(self, "values", tuple(int(v) for v in values))

    @classmethod
    def zeros(cls, net: FlowNetwork) -> "Flow":
        return cls((0,) * len(net.edges))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]


@dataclass(frozen=True)
class StNetwork:
    """Source/sink form of a balance network.

    Node order: source first (index 0), original nodes in their original
    relative order, sink last.  Edge order: interior edges verbatim (same
    indices as the original network), then one source edge per supply node in
    node order, then one sink edge per demand node in node order.  All
    balances in the transformed network are 0; the s/t imbalance is carried
    implicitly by the flow value.
    """

    network: FlowNetwork
    source: NodeId
    sink: NodeId
    interior_count: int
    source_edges: Mapping[NodeId, int]
    sink_edges: Mapping[NodeId, int]

    def interior_values(self, f: Flow) -> tuple[int, ...]:
        return f.values[: self.interior_count]

    def with_value_balances(self, value: int) -> FlowNetwork:
        """Network copy whose s/t balances are +/- value, for exact validation."""
        return self.network.with_balances({self.source: value, self.sink: -value})


# -- violations -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CapacityViolation:
    edge: int
    flow: int
    capacity: int


@dataclass(frozen=True, slots=True)
class LowerBoundViolation:
    edge: int
    flow: int
    lower_bound: int


@dataclass(frozen=True, slots=True)
class BalanceViolation:
    node: NodeId
    expected: int
    observed: int


@dataclass(frozen=True)
class ValidationReport:
    capacity_violations: tuple[CapacityViolation, ...] = ()
    lower_bound_violations: tuple[LowerBoundViolation, ...] = ()
    balance_violations: tuple[BalanceViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not (
            self.capacity_violations or self.lower_bound_violations or self.balance_violations
        )

    def first_message(self) -> str:
        if self.capacity_violations:
            v = self.capacity_violations[0]
            return f"edge {v.edge}: flow {v.flow} exceeds capacity {v.capacity}"
        if self.lower_bound_violations:
            v = self.lower_bound_violations[0]
            return f"edge {v.edge}: flow {v.flow} below lower bound {v.lower_bound}"
        if self.balance_violations:
            b = self.balance_violations[0]
            return f"node {b.node!r}: net outflow {b.observed}, expected {b.expected}"
        return "ok"


def validate_flow(net: FlowNetwork, f: Flow) -> ValidationReport:
    """List every capacity, lower-bound and node-balance violation of ``f``.

    An empty report is the feasibility certificate.  A flow whose length does
    not match the edge count is a usage error and raises instead of being
    reported.
    """
    if len(f) != len(net.edges):
        raise FlowError(f"flow has {len(f)} values for {len(net.edges)} edges")
    caps = []
    lows = []
    for i, (e, x) in enumerate(zip(net.edges, f.values)):
        if x > e.capacity:
            caps.append(CapacityViolation(i, x, e.capacity))
        if x < e.lower_bound:
            lows.append(LowerBoundViolation(i, x, e.lower_bound))
    net_out: dict[NodeId, int] = {n: 0 for n in net.nodes}
    for e, x in zip(net.edges, f.values):
        net_out[e.tail] += x
        net_out[e.head] -= x
    bals = tuple(
        BalanceViolation(n, net.balance(n), net_out[n])
        for n in net.nodes
        if net_out[n] != net.balance(n)
    )
    return ValidationReport(tuple(caps), tuple(lows), bals)


def flow_cost(net: FlowNetwork, f: Flow) -> int:
    """Total cost sum(cost_e * x_e), exact in arbitrary-precision integers."""
    if len(f) != len(net.edges):
        raise FlowError(f"flow has {len(f)} values for {len(net.edges)} edges")
    return sum(e.cost * x for e, x in zip(net.edges, f.values))


def node_net_outflow(net: FlowNetwork, f: Flow) -> dict[NodeId, int]:
    """Out minus in per node, in node order."""
    if len(f) != len(net.edges):
        raise FlowError(f"flow has {len(f)} values for {len(net.edges)} edges")
    out: dict[NodeId, int] = {n: 0 for n in net.nodes}
    for e, x in zip(net.edges, f.values):
        out[e.tail] += x
        out[e.head] -= x
    return out


# -- transforms -----------------------------------------------------------------


def build_st_transform(net: FlowNetwork) -> StNetwork:
    """Attach a single source and sink carrying the node balances.

    Every supply node i gains a source edge (s, i) with capacity b(i) and
    cost 0; every demand node j gains a sink edge (j, t) with capacity -b(j)
    and cost 0.  Requires zero lower bounds (run lower_bound_transform
    first).
    """
    if net.has_lower_bounds:
        raise NetworkError("st transform requires zero lower bounds; apply lower_bound_transform first")
    for reserved in (SOURCE, SINK):
        if reserved in net.node_index:
            raise NetworkError(f"node id {reserved!r} is reserved for the st transform")
    nodes = (SOURCE,) + net.nodes + (SINK,)
    edges = list(net.edges)
    source_edges: dict[NodeId, int] = {}
    sink_edges: dict[NodeId, int] = {}
    for n in net.nodes:
        b = net.balance(n)
        if b > 0:
            source_edges[n] = len(edges)
            edges.append(Edge(SOURCE, n, b, 0, 0))
    for n in net.nodes:
        b = net.balance(n)
        if b < 0:
            sink_edges[n] = len(edges)
            edges.append(Edge(n, SINK, -b, 0, 0))
    st_net = FlowNetwork(nodes, edges, {})
    return StNetwork(st_net, SOURCE, SINK, len(net.edges), source_edges, sink_edges)


def lower_bound_transform(net: FlowNetwork) -> tuple[FlowNetwork, int]:
    """Shift every edge's flow range from [l, u] to [0, u - l].

    The mandatory l units move into the node balances: the tail's balance
    drops by l, the head's rises by l.  Returns the transformed network and
    the constant cost offset sum(l_e * cost_e) that the removed units always
    incur.  Edge order and costs are preserved, so flows map back by index.
    """
    balances = {n: net.balance(n) for n in net.nodes}
    edges = []
    offset = 0
    for e in net.edges:
        l = e.lower_bound
        if l:
            balances[e.tail] -= l
            balances[e.head] += l
            offset += l * e.cost
        edges.append(Edge(e.tail, e.head, e.capacity - l, 0, e.cost))
    balances = {n: b for n, b in balances.items() if b != 0}
    return FlowNetwork(net.nodes, edges, balances), offset


def restore_lower_bounds(net: FlowNetwork, transformed_flow: Flow) -> Flow:
    """Map a flow on lower_bound_transform(net) back to ``net`` (adds l per edge)."""
    if len(transformed_flow) != len(net.edges):
        raise FlowError(
            f"flow has {len(transformed_flow)} values for {len(net.edges)} edges"
        )
    return Flow(x + e.lower_bound for e, x in zip(net.edges, transformed_flow.values))


# -- residual graph -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ResidualArc:
    """One residual arc; ``edge`` and ``forward`` reference the originating edge."""

    tail: NodeId
    head: NodeId
    residual: int
    cost: int
    edge: int
    forward: bool


@dataclass(frozen=True)
class ResidualGraph:
    """Residual arcs of a feasible flow.

    Arc order is deterministic: all forward arcs in edge order, then all
    backward arcs in edge order.  Arcs with zero residual are omitted.
    """

    nodes: tuple[NodeId, ...]
    arcs: tuple[ResidualArc, ...]

    @cached_property
    def node_index(self) -> dict[NodeId, int]:
        return {n: i for i, n in enumerate(self.nodes)}


def residual_graph(net: FlowNetwork, f: Flow) -> ResidualGraph:
    """Residual graph of ``f``; raises for infeasible flows.

    Forward arc residual is capacity - x at cost +c; backward arc residual is
    x - lower_bound at cost -c.  Balance feasibility is checked against the
    network's balances, so callers with an s/t imbalance should validate on a
    with_value_balances copy.
    """
    report = validate_flow(net, f)
    if not report.ok:
        raise FlowError(f"infeasible flow: {report.first_message()}")
    arcs: list[ResidualArc] = []
    for i, (e, x) in enumerate(zip(net.edges, f.values)):
        r = e.capacity - x
        if r > 0:
            arcs.append(ResidualArc(e.tail, e.head, r, e.cost, i, True))
    for i, (e, x) in enumerate(zip(net.edges, f.values)):
        r = x - e.lower_bound
        if r > 0:
            arcs.append(ResidualArc(e.head, e.tail, r, -e.cost, i, False))
    return ResidualGraph(net.nodes, tuple(arcs))
