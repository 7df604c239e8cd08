"""Max-flow and min-cost-flow solvers plus independent correctness oracles.

The production pipeline mirrors the classic two-stage approach: Edmonds-Karp
max flow on the source/sink-transformed network, then cycle canceling, i.e.
repeatedly augmenting along negative-cost residual cycles until the
optimality certificate (no negative residual cycle) holds.  A successive
shortest paths implementation with node potentials exists as an independent
cross-check and as the faster flag-selectable solver for large instances,
and an exhaustive brute-force enumerator acts as the ground-truth oracle on
tiny instances.

Semantics are "elastic": a supply node may ship anything in [0, b(i)] and a
demand node may absorb anything in [0, -b(i)]; solvers maximize the total
shipped first and minimize cost second.  Exact conservation therefore holds
in the transformed space (see SolveResult.st_network), while the
original-space flow fills demands only as far as supply allows.

Demand floors (guaranteed minimum deliveries) are supported by placing lower
bounds on sink edges of the st transform and routing the solve through
lower_bound_transform; see solve_with_sink_floors.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Callable, Literal, Mapping

from .network import (
    Edge,
    Flow,
    FlowError,
    FlowNetwork,
    NetworkError,
    NodeId,
    ResidualGraph,
    StNetwork,
    build_st_transform,
    flow_cost,
    lower_bound_transform,
    node_net_outflow,
    residual_graph,
    restore_lower_bounds,
    validate_flow,
)

SolverName = Literal["cycle-canceling", "successive-shortest-paths"]
SOLVER_NAMES: tuple[str, ...] = ("cycle-canceling", "successive-shortest-paths")


class FloorInfeasibleError(ValueError):
    """Demand floors cannot all be met; carries the feasibility arithmetic."""

    def __init__(self, required: int, available: int, reason: str = "total supply below total floors"):
        self.required = required
        self.available = available
        self.reason = reason
        super().__init__(f"{reason}: need {required}, have {available}")


class BruteForceTooLarge(ValueError):
    """The instance exceeds what exhaustive enumeration will attempt."""


@dataclass(frozen=True)
class SolveStats:
    """Deterministic solve counters; wall_time is informational only and is
    never written into canonical reports."""

    augmentations: int = 0
    cycles_canceled: int = 0
    final_flow_value: int = 0
    final_cost: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a min-cost solve.

    ``flow`` lives on the original network (partial demand fill allowed);
    ``st_flow`` lives on ``st_network``, the transformed network whose s/t
    balances are set to +/- value, where the flow conserves exactly and where
    optimality is certified (no negative residual cycle).
    """

    flow: Flow
    value: int
    cost: int
    stats: SolveStats
    st_network: FlowNetwork
    st_flow: Flow


@dataclass(frozen=True)
class NegativeCycle:
    """A negative-cost residual cycle; arcs are chained tail-to-head."""

    arcs: tuple
    total_cost: int
    bottleneck: int


# -- compiled representation ----------------------------------------------------
#
# Solver inner loops run on integer node indices and parallel arrays.  A
# residual arc id a encodes: a < m is the forward arc of edge a, a >= m is
# the backward arc of edge a - m.  Per-node adjacency lists hold forward
# arcs in edge order followed by backward arcs in edge order, which realises
# the documented lowest-arc-index tie-breaking.


class _Compiled:
    __slots__ = ("n", "m", "index", "tails", "heads", "caps", "lows", "costs", "adj")

    def __init__(self, net: FlowNetwork) -> None:
        self.index = net.node_index
        self.n = len(net.nodes)
        self.m = len(net.edges)
        self.tails = [self.index[e.tail] for e in net.edges]
        self.heads = [self.index[e.head] for e in net.edges]
        self.caps = [e.capacity for e in net.edges]
        self.lows = [e.lower_bound for e in net.edges]
        self.costs = [e.cost for e in net.edges]
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for e in range(self.m):
            adj[self.tails[e]].append(e)
        for e in range(self.m):
            adj[self.heads[e]].append(self.m + e)
        self.adj = adj


def _shipped(net: FlowNetwork, f: Flow) -> int:
    out = node_net_outflow(net, f)
    return sum(out[n] for n in net.nodes if net.balance(n) > 0)


def _elastic_violations(net: FlowNetwork, f: Flow) -> list[tuple[NodeId, int, int]]:
    """Nodes whose net outflow falls outside [min(0, b), max(0, b)]."""
    out = node_net_outflow(net, f)
    bad = []
    for n in net.nodes:
        b = net.balance(n)
        v = out[n]
        if not (min(0, b) <= v <= max(0, b)):
            bad.append((n, b, v))
    return bad


# -- max flow -------------------------------------------------------------------


def max_flow(stnet: StNetwork, start: Flow | None = None) -> tuple[Flow, int, SolveStats]:
    """Edmonds-Karp max flow from source to sink.

    Augmenting paths are shortest by arc count (BFS) with deterministic
    lowest-arc-index tie-breaking.  With the default zero start the network
    must have zero lower bounds; passing a feasible ``start`` flow (exact
    interior conservation, any s/t value) lets callers continue augmenting
    on networks whose sink edges carry lower bounds.
    """
    t0 = time.perf_counter()
    net = stnet.network
    cn = _Compiled(net)
    s = cn.index[stnet.source]
    t = cn.index[stnet.sink]
    if start is None:
        if net.has_lower_bounds:
            raise FlowError("zero start flow needs zero lower bounds; pass a feasible start")
        flow = [0] * cn.m
        value = 0
    else:
        flow = list(start.values)
        # value of the start flow = net outflow of the source
        value = sum(flow[e] for e in range(cn.m) if cn.tails[e] == s) - sum(
            flow[e] for e in range(cn.m) if cn.heads[e] == s
        )
        report = validate_flow(stnet.with_value_balances(value), start)
        if not report.ok:
            raise FlowError(f"infeasible start flow: {report.first_message()}")

    caps, lows, heads, tails, adj, m = cn.caps, cn.lows, cn.heads, cn.tails, cn.adj, cn.m
    augmentations = 0
    while True:
        pred = [-1] * cn.n
        pred[s] = -2
        q = deque([s])
        found = False
        while q and not found:
            u = q.popleft()
            for a in adj[u]:
                if a < m:
                    e = a
                    r = caps[e] - flow[e]
                    v = heads[e]
                else:
                    e = a - m
                    r = flow[e] - lows[e]
                    v = tails[e]
                if r > 0 and pred[v] == -1:
                    pred[v] = a
                    if v == t:
                        found = True
                        break
                    q.append(v)
        if not found:
            break
        # trace t back to s, find the bottleneck, then apply it
        path = []
        v = t
        while v != s:
            a = pred[v]
            path.append(a)
            v = tails[a] if a < m else heads[a - m]
        delta = None
        for a in path:
            r = caps[a] - flow[a] if a < m else flow[a - m] - lows[a - m]
            delta = r if delta is None else min(delta, r)
        for a in path:
            if a < m:
                flow[a] += delta
            else:
                flow[a - m] -= delta
        value += delta
        augmentations += 1

    result = Flow(flow)
    stats = SolveStats(
        augmentations=augmentations,
        cycles_canceled=0,
        final_flow_value=value,
        final_cost=flow_cost(net, result),
        wall_time=time.perf_counter() - t0,
    )
    return result, value, stats


# -- negative cycle detection ---------------------------------------------------


def find_negative_cycle(res: ResidualGraph) -> NegativeCycle | None:
    """Bellman-Ford negative-cycle detection on a residual graph.

    Equivalent to running Bellman-Ford from a virtual super-source attached
    to every node by a zero-cost arc (distances start at 0).  Arcs relax in
    residual-graph order each sweep, so detection is deterministic.  On
    detection the entry point is walked back |V| predecessor steps to land
    on the cycle, which is then traced and returned in forward order.
    """
    n = len(res.nodes)
    if n == 0 or not res.arcs:
        return None
    index = res.node_index
    arc_u = [index[a.tail] for a in res.arcs]
    arc_v = [index[a.head] for a in res.arcs]
    arc_c = [a.cost for a in res.arcs]
    na = len(res.arcs)
    dist = [0] * n
    pred = [-1] * n
    entry = -1
    for sweep in range(n):
        first_relaxed = -1
        for ai in range(na):
            u = arc_u[ai]
            nd = dist[u] + arc_c[ai]
            v = arc_v[ai]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = ai
                if first_relaxed < 0:
                    first_relaxed = v
        if first_relaxed < 0:
            return None
        entry = first_relaxed
    # a relaxation in sweep |V| proves a negative cycle; walk onto it
    node = entry
    for _ in range(n):
        node = arc_u[pred[node]]
    cycle_start = node
    rev = []
    while True:
        ai = pred[node]
        rev.append(ai)
        node = arc_u[ai]
        if node == cycle_start:
            break
    arcs = tuple(res.arcs[ai] for ai in reversed(rev))
    total = sum(a.cost for a in arcs)
    if total >= 0:  # pragma: no cover - guarded by Bellman-Ford theory
        raise AssertionError("traced cycle is not negative")
    bottleneck = min(a.residual for a in arcs)
    return NegativeCycle(arcs, total, bottleneck)


def cancel_cycles(net: FlowNetwork, f: Flow) -> tuple[Flow, SolveStats]:
    """Augment along negative residual cycles until none remain.

    Preserves the flow value (cycles change no node's net flow) and each
    cancellation strictly decreases total cost by bottleneck * |cycle cost|.
    The input flow must be feasible for ``net``; callers solving s-t
    problems pass a with_value_balances copy.
    """
    t0 = time.perf_counter()
    report = validate_flow(net, f)
    if not report.ok:
        raise FlowError(f"infeasible flow: {report.first_message()}")
    flow = list(f.values)
    cycles = 0
    cost = flow_cost(net, f)
    while True:
        cyc = find_negative_cycle(residual_graph(net, Flow(flow)))
        if cyc is None:
            break
        for a in cyc.arcs:
            if a.forward:
                flow[a.edge] += cyc.bottleneck
            else:
                flow[a.edge] -= cyc.bottleneck
        cost += cyc.bottleneck * cyc.total_cost
        cycles += 1
    result = Flow(flow)
    stats = SolveStats(
        augmentations=0,
        cycles_canceled=cycles,
        final_flow_value=0,
        final_cost=cost,
        wall_time=time.perf_counter() - t0,
    )
    assert cost == flow_cost(net, result)
    return result, stats


# -- min-cost pipelines ---------------------------------------------------------


def _package(
    net: FlowNetwork,
    stnet: StNetwork,
    st_flow: Flow,
    augmentations: int,
    cycles: int,
    t0: float,
) -> SolveResult:
    """Map an st-space flow back to the original network and bundle the result."""
    interior = Flow(stnet.interior_values(st_flow))
    f_orig = restore_lower_bounds(net, interior)
    bad = _elastic_violations(net, f_orig)
    if bad:
        nodes = ", ".join(repr(n) for n, _, _ in bad[:5])
        raise FlowError(f"lower bounds are infeasible for the given balances (nodes {nodes})")
    value = _shipped(net, f_orig)
    cost = flow_cost(net, f_orig)
    st_value = sum(
        st_flow[i] for i in stnet.source_edges.values()
    )
    stats = SolveStats(
        augmentations=augmentations,
        cycles_canceled=cycles,
        final_flow_value=value,
        final_cost=cost,
        wall_time=time.perf_counter() - t0,
    )
    return SolveResult(
        flow=f_orig,
        value=value,
        cost=cost,
        stats=stats,
        st_network=stnet.with_value_balances(st_value),
        st_flow=st_flow,
    )


def min_cost_flow(net: FlowNetwork) -> SolveResult:
    """Maximum-value minimum-cost flow via max flow plus cycle canceling.

    Applies lower_bound_transform, then build_st_transform, runs
    Edmonds-Karp, and cancels negative residual cycles to optimality.
    Raises FlowError when edge lower bounds cannot be met within the node
    balances.
    """
    t0 = time.perf_counter()
    net0, _offset = lower_bound_transform(net)
    st = build_st_transform(net0)
    f_max, value, s1 = max_flow(st)
    f_opt, s2 = cancel_cycles(st.with_value_balances(value), f_max)
    return _package(net, st, f_opt, s1.augmentations, s2.cycles_canceled, t0)


def successive_shortest_paths(net: FlowNetwork) -> SolveResult:
    """Min-cost max flow by shortest-path augmentation with node potentials.

    Shortest paths use Dijkstra on reduced costs (original costs must be
    nonnegative, which street distances are); potentials keep reduced costs
    nonnegative after every augmentation.  Exists as an independent
    cross-check of min_cost_flow and as the faster choice at scale.
    """
    t0 = time.perf_counter()
    if any(e.cost < 0 for e in net.edges):
        raise NetworkError("successive shortest paths requires nonnegative edge costs")
    net0, _offset = lower_bound_transform(net)
    st = build_st_transform(net0)
    st_flow, augs = _run_ssp(st, None, bf_init=False)
    return _package(net, st, st_flow, augs, 0, t0)


def _bf_potentials(cn: _Compiled, flow: list[int], s: int) -> list[int]:
    """Bellman-Ford distances from s over the residual graph, as potentials."""
    dist: list[int | None] = [None] * cn.n
    dist[s] = 0
    for _ in range(cn.n - 1):
        changed = False
        for e in range(cn.m):
            du = dist[cn.tails[e]]
            if du is not None and cn.caps[e] - flow[e] > 0:
                nd = du + cn.costs[e]
                v = cn.heads[e]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    changed = True
        for e in range(cn.m):
            du = dist[cn.heads[e]]
            if du is not None and flow[e] - cn.lows[e] > 0:
                nd = du - cn.costs[e]
                v = cn.tails[e]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    changed = True
        if not changed:
            break
    return [d if d is not None else 0 for d in dist]


def _run_ssp(stnet: StNetwork, start: Flow | None, bf_init: bool) -> tuple[Flow, int]:
    """Shortest-path augmentation engine on an st network.

    ``start`` must be feasible (it is how the demand-floor phase hands over
    its mandatory flow); ``bf_init`` recomputes potentials by Bellman-Ford
    first, required whenever the start flow's residual carries negative
    costs that plain zero potentials would not cover.
    """
    net = stnet.network
    cn = _Compiled(net)
    s = cn.index[stnet.source]
    t = cn.index[stnet.sink]
    if start is None:
        if net.has_lower_bounds:
            raise FlowError("zero start flow needs zero lower bounds; pass a feasible start")
        flow = [0] * cn.m
    else:
        flow = list(start.values)
    pi = _bf_potentials(cn, flow, s) if bf_init else [0] * cn.n
    caps, lows, heads, tails, costs, adj, m = (
        cn.caps,
        cn.lows,
        cn.heads,
        cn.tails,
        cn.costs,
        cn.adj,
        cn.m,
    )
    augmentations = 0
    while True:
        dist: list[int | None] = [None] * cn.n
        pred = [-1] * cn.n
        done = [False] * cn.n
        dist[s] = 0
        heap: list[tuple[int, int]] = [(0, s)]
        while heap:
            d, u = heappop(heap)
            if done[u]:
                continue
            done[u] = True
            if u == t:
                break
            pu = pi[u]
            for a in adj[u]:
                if a < m:
                    e = a
                    if caps[e] - flow[e] <= 0:
                        continue
                    v = heads[e]
                    c = costs[e]
                else:
                    e = a - m
                    if flow[e] - lows[e] <= 0:
                        continue
                    v = tails[e]
                    c = -costs[e]
                if done[v]:
                    continue
                nd = d + c + pu - pi[v]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    pred[v] = a
                    heappush(heap, (nd, v))
        if dist[t] is None or not done[t]:
            break
        dt = dist[t]
        for v in range(cn.n):
            dv = dist[v]
            pi[v] += dt if dv is None else min(dv, dt)
        # trace path and push the bottleneck
        path = []
        v = t
        while v != s:
            a = pred[v]
            path.append(a)
            v = tails[a] if a < m else heads[a - m]
        delta = None
        for a in path:
            r = caps[a] - flow[a] if a < m else flow[a - m] - lows[a - m]
            delta = r if delta is None else min(delta, r)
        for a in path:
            if a < m:
                flow[a] += delta
            else:
                flow[a - m] -= delta
        augmentations += 1
    return Flow(flow), augmentations


# -- demand floors --------------------------------------------------------------


def solve_with_sink_floors(
    net: FlowNetwork,
    floors: Mapping[NodeId, int],
    method: SolverName = "cycle-canceling",
) -> SolveResult:
    """Min-cost max flow where each floored demand node must receive at least
    min(floor, demand).

    The floor becomes a lower bound on the node's sink edge in the st
    transform, and the solve routes through lower_bound_transform
    conceptually: phase one ships the mandatory amounts (an ordinary elastic
    solve against the floor demands), phase two continues augmenting on the
    lower-bounded residual where backward sink arcs cannot drop below the
    floors, and the chosen method then optimizes cost at fixed value.
    Raises FloorInfeasibleError when the floors cannot all be met.
    """
    t0 = time.perf_counter()
    if method not in SOLVER_NAMES:
        raise ValueError(f"unknown solver {method!r}")
    if net.has_lower_bounds:
        raise NetworkError("sink floors combined with interior lower bounds are not supported")
    lmap: dict[NodeId, int] = {}
    for node, fl in floors.items():
        demand = -net.balance(node)
        if demand < 0 or net.balance(node) > 0:
            raise NetworkError(f"floor given for non-demand node {node!r}")
        l = min(int(fl), demand)
        if l > 0:
            lmap[node] = l
    lsum = sum(lmap.values())
    if lsum == 0:
        return min_cost_flow(net) if method == "cycle-canceling" else successive_shortest_paths(net)
    if lsum > net.total_supply:
        raise FloorInfeasibleError(lsum, net.total_supply)

    st = build_st_transform(net)
    lb_edges = list(st.network.edges)
    for node, l in lmap.items():
        i = st.sink_edges[node]
        e = lb_edges[i]
        lb_edges[i] = Edge(e.tail, e.head, e.capacity, l, e.cost)
    st_lb = StNetwork(
        FlowNetwork(st.network.nodes, lb_edges, {}),
        st.source,
        st.sink,
        st.interior_count,
        st.source_edges,
        st.sink_edges,
    )

    # phase one: mandatory demands only
    m_balances = {n: b for n, b in net.balances.items() if b > 0}
    m_balances.update({n: -l for n, l in lmap.items()})
    st_m = build_st_transform(net.with_balances(m_balances))
    if method == "cycle-canceling":
        f_m, v_m, s_m = max_flow(st_m)
        aug_m = s_m.augmentations
    else:
        f_m, aug_m = _run_ssp(st_m, None, bf_init=False)
        v_m = sum(f_m[i] for i in st_m.source_edges.values())
    if v_m < lsum:
        raise FloorInfeasibleError(lsum, v_m, "floors unreachable through the network")

    # lift the phase-one flow onto the lower-bounded st network
    start_vals = [0] * len(st_lb.network.edges)
    for i in range(st.interior_count):
        start_vals[i] = f_m[i]
    for node, i in st_lb.source_edges.items():
        start_vals[i] = f_m[st_m.source_edges[node]]
    for node, l in lmap.items():
        start_vals[st_lb.sink_edges[node]] = f_m[st_m.sink_edges[node]]
    start = Flow(start_vals)

    if method == "cycle-canceling":
        f_max, value, s1 = max_flow(st_lb, start=start)
        f_opt, s2 = cancel_cycles(st_lb.with_value_balances(value), f_max)
        augs, cycles = aug_m + s1.augmentations, s2.cycles_canceled
    else:
        f_opt, aug2 = _run_ssp(st_lb, start, bf_init=True)
        augs, cycles = aug_m + aug2, 0

    result = _package(net, st_lb, f_opt, augs, cycles, t0)
    for node, l in lmap.items():
        got = result.st_flow[st_lb.sink_edges[node]]
        assert got >= l, f"floor violated at {node!r}: {got} < {l}"
    return result


def solve_market(
    net: FlowNetwork,
    floors: Mapping[NodeId, int] | None = None,
    method: SolverName = "cycle-canceling",
) -> SolveResult:
    """Dispatch helper: plain elastic solve, or floor-constrained when floors given."""
    if floors:
        return solve_with_sink_floors(net, floors, method)
    if method == "cycle-canceling":
        return min_cost_flow(net)
    if method == "successive-shortest-paths":
        return successive_shortest_paths(net)
    raise ValueError(f"unknown solver {method!r}")


def optimality_certificate(result: SolveResult) -> bool:
    """True when the residual graph of the solved flow has no negative cycle."""
    return find_negative_cycle(residual_graph(result.st_network, result.st_flow)) is None


# -- brute-force oracle ---------------------------------------------------------

_BF_MAX_EDGES = 20
_BF_MAX_NODES = 14
_BF_MAX_RANGE = 12
_BF_MAX_STATES = 20_000_000


def _tiny_max_value(net: FlowNetwork) -> int:
    """Max shippable total by plain DFS Ford-Fulkerson; deliberately naive and
    independent of the production solver path."""
    n = len(net.nodes)
    idx = net.node_index
    s, t = n, n + 1
    adj: list[list[int]] = [[] for _ in range(n + 2)]
    arcs: list[list[int]] = []  # [to, residual]; pair i ^ 1 is the reverse

    def add(u: int, v: int, cap: int) -> None:
        adj[u].append(len(arcs))
        arcs.append([v, cap])
        adj[v].append(len(arcs))
        arcs.append([u, 0])

    for e in net.edges:
        add(idx[e.tail], idx[e.head], e.capacity)
    for node in net.nodes:
        b = net.balance(node)
        if b > 0:
            add(s, idx[node], b)
        elif b < 0:
            add(idx[node], t, -b)

    def dfs(u: int, pushed: int, seen: list[bool]) -> int:
        if u == t:
            return pushed
        seen[u] = True
        for ai in adj[u]:
            v, r = arcs[ai]
            if r > 0 and not seen[v]:
                got = dfs(v, min(pushed, r), seen)
                if got:
                    arcs[ai][1] -= got
                    arcs[ai ^ 1][1] += got
                    return got
        return 0

    total = 0
    while True:
        got = dfs(s, 1 << 60, [False] * (n + 2))
        if not got:
            return total
        total += got


def brute_force_solve(net: FlowNetwork) -> tuple[int, int]:
    """Exhaustively determine (max shipped value, min cost at that value).

    Enumerates per-edge flows with interval pruning on achievable node
    balances, a bound on reachable value, and cost branch-and-bound.  Guarded
    by structural limits plus a hard visited-state counter; instances beyond
    the guard raise BruteForceTooLarge.  Raises FlowError when lower bounds
    admit no feasible flow at all.
    """
    m = len(net.edges)
    n = len(net.nodes)
    if m > _BF_MAX_EDGES or n > _BF_MAX_NODES:
        raise BruteForceTooLarge(f"instance too large to enumerate ({n} nodes, {m} edges)")
    if any(e.capacity - e.lower_bound > _BF_MAX_RANGE for e in net.edges):
        raise BruteForceTooLarge("edge flow range too wide to enumerate")

    idx = net.node_index
    tails = [idx[e.tail] for e in net.edges]
    heads = [idx[e.head] for e in net.edges]
    lows = [e.lower_bound for e in net.edges]
    caps = [e.capacity for e in net.edges]
    costs = [e.cost for e in net.edges]
    bal = [net.balance(node) for node in net.nodes]
    hi = [max(0, b) for b in bal]
    lo = [min(0, b) for b in bal]
    supply_nodes = [i for i in range(n) if bal[i] > 0]
    demand_nodes = [i for i in range(n) if bal[i] < 0]
    nonneg_costs = all(c >= 0 for c in costs)

    rem_out_u = [0] * n
    rem_out_l = [0] * n
    rem_in_u = [0] * n
    rem_in_l = [0] * n
    for e in range(m):
        rem_out_u[tails[e]] += caps[e]
        rem_out_l[tails[e]] += lows[e]
        rem_in_u[heads[e]] += caps[e]
        rem_in_l[heads[e]] += lows[e]
    suffix_min_cost = [0] * (m + 1)
    for e in range(m - 1, -1, -1):
        suffix_min_cost[e] = suffix_min_cost[e + 1] + lows[e] * costs[e]

    netf = [0] * n
    states = 0

    def final_bounds(i: int) -> tuple[int, int]:
        return (
            netf[i] + rem_out_l[i] - rem_in_u[i],
            netf[i] + rem_out_u[i] - rem_in_l[i],
        )

    def value_bound() -> int:
        up_s = 0
        for i in supply_nodes:
            up_s += min(hi[i], netf[i] + rem_out_u[i] - rem_in_l[i])
        up_d = 0
        for i in demand_nodes:
            fmin = netf[i] + rem_out_l[i] - rem_in_u[i]
            up_d += min(-lo[i], max(0, -fmin))
        return min(up_s, up_d)

    def prune_nodes(a: int, b: int) -> bool:
        for i in (a, b):
            fmin, fmax = final_bounds(i)
            if fmin > hi[i] or fmax < lo[i]:
                return True
        return False

    best_value = -1

    def search_value(e: int) -> None:
        nonlocal best_value, states
        if e == m:
            shipped = sum(netf[i] for i in supply_nodes)
            if shipped > best_value:
                best_value = shipped
            return
        a, b = tails[e], heads[e]
        rem_out_u[a] -= caps[e]
        rem_out_l[a] -= lows[e]
        rem_in_u[b] -= caps[e]
        rem_in_l[b] -= lows[e]
        for x in range(lows[e], caps[e] + 1):
            states += 1
            if states > _BF_MAX_STATES:
                raise BruteForceTooLarge("enumeration state limit exceeded")
            netf[a] += x
            netf[b] -= x
            if not prune_nodes(a, b) and value_bound() > best_value:
                search_value(e + 1)
            netf[a] -= x
            netf[b] += x
        rem_out_u[a] += caps[e]
        rem_out_l[a] += lows[e]
        rem_in_u[b] += caps[e]
        rem_in_l[b] += lows[e]

    if net.has_lower_bounds:
        search_value(0)
        if best_value < 0:
            raise FlowError("lower bounds admit no feasible flow")
        target = best_value
    else:
        target = _tiny_max_value(net)

    best_cost: int | None = None

    def search_cost(e: int, cost: int) -> None:
        nonlocal best_cost, states
        if e == m:
            if sum(netf[i] for i in supply_nodes) == target:
                if best_cost is None or cost < best_cost:
                    best_cost = cost
            return
        a, b = tails[e], heads[e]
        rem_out_u[a] -= caps[e]
        rem_out_l[a] -= lows[e]
        rem_in_u[b] -= caps[e]
        rem_in_l[b] -= lows[e]
        for x in range(lows[e], caps[e] + 1):
            states += 1
            if states > _BF_MAX_STATES:
                raise BruteForceTooLarge("enumeration state limit exceeded")
            c2 = cost + x * costs[e]
            if (
                nonneg_costs
                and best_cost is not None
                and c2 + suffix_min_cost[e + 1] >= best_cost
            ):
                # costs are nonnegative, so larger x on this edge only costs more
                break
            netf[a] += x
            netf[b] -= x
            if not prune_nodes(a, b) and value_bound() >= target:
                search_cost(e + 1, c2)
            netf[a] -= x
            netf[b] += x
        rem_out_u[a] += caps[e]
        rem_out_l[a] += lows[e]
        rem_in_u[b] += caps[e]
        rem_in_l[b] += lows[e]

    search_cost(0, 0)
    if best_cost is None:
        raise FlowError("no feasible flow reaches the maximum value")
    return target, best_cost


def brute_force_min_cost(net: FlowNetwork) -> int:
    """Minimum cost at maximum shipped value, by exhaustive enumeration."""
    return brute_force_solve(net)[1]
