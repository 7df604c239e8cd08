"""Solver suite: frozen small-instance optima plus randomized cross-checks.

The expected numbers in this file were fixed by exhaustive enumeration
(brute_force_solve) before the solvers existed; the solvers have to hit
them, not the other way around.
"""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from timberflow.network import (
    Edge,
    Flow,
    FlowNetwork,
    NetworkError,
    build_st_transform,
    flow_cost,
    residual_graph,
)
from timberflow.solver import (
    BruteForceTooLarge,
    FloorInfeasibleError,
    brute_force_min_cost,
    brute_force_solve,
    cancel_cycles,
    find_negative_cycle,
    max_flow,
    min_cost_flow,
    solve_market,
    solve_with_sink_floors,
    successive_shortest_paths,
)

from conftest import assert_certified, build_two_by_two, random_bipartite


# -- max flow -------------------------------------------------------------------


def test_max_flow_bottleneck():
    net = FlowNetwork(("A", "B"), [Edge("A", "B", 10)], {"A": 5, "B": -3})
    f, value, stats = max_flow(build_st_transform(net))
    assert value == 3
    assert stats.final_flow_value == 3


def test_max_flow_disconnected_demand_ships_reachable_only():
    net = FlowNetwork(
        ("v", "t1", "t2"),
        [Edge("v", "t1", 3)],
        {"v": 5, "t1": -3, "t2": -4},
    )
    _, value, _ = max_flow(build_st_transform(net))
    assert value == 3


def test_max_flow_two_by_two_value(two_by_two):
    _, value, _ = max_flow(build_st_transform(two_by_two))
    assert value == 10  # min(total supply, total demand)


# -- negative cycle detection ---------------------------------------------------


def test_find_negative_cycle_on_cost_triangle():
    net = FlowNetwork(
        ("A", "B", "C"),
        [Edge("A", "B", 5, cost=2), Edge("B", "C", 5, cost=-5), Edge("C", "A", 5, cost=1)],
        {},
    )
    cycle = find_negative_cycle(residual_graph(net, Flow((0, 0, 0))))
    assert cycle is not None
    assert cycle.total_cost == -2
    assert cycle.bottleneck == 5
    heads = [a.head for a in cycle.arcs]
    tails = [a.tail for a in cycle.arcs]
    assert heads[-1] == tails[0] and all(h == t for h, t in zip(heads, tails[1:]))


def test_find_negative_cycle_none_on_empty():
    net = FlowNetwork(("A",), [], {})
    assert find_negative_cycle(residual_graph(net, Flow(()))) is None


def test_find_negative_cycle_none_at_optimum(two_by_two):
    f = Flow((4, 1, 0, 5))
    assert find_negative_cycle(residual_graph(two_by_two, f)) is None


# -- cycle canceling ------------------------------------------------------------


def test_cancel_cycles_leaves_optimum_alone(two_by_two):
    f = Flow((4, 1, 0, 5))
    out, stats = cancel_cycles(two_by_two, f)
    assert out.values == f.values
    assert stats.cycles_canceled == 0


def test_cancel_cycles_single_exchange(two_by_two):
    # worst feasible routing of the full 10 units; one 4-arc exchange of
    # cost -3 and bottleneck 4 repairs it in a single cancellation
    start = Flow((0, 5, 4, 1))
    assert flow_cost(two_by_two, start) == 23
    out, stats = cancel_cycles(two_by_two, start)
    assert out.values == (4, 1, 0, 5)
    assert stats.cycles_canceled == 1
    assert stats.final_cost == 23 - 4 * 3


# -- end-to-end solves ----------------------------------------------------------


def test_brute_force_fixes_the_two_by_two_optimum(two_by_two):
    assert brute_force_solve(two_by_two) == (10, 11)
    assert brute_force_min_cost(two_by_two) == 11


def test_min_cost_flow_two_by_two(two_by_two):
    res = min_cost_flow(two_by_two)
    assert (res.value, res.cost) == (10, 11)
    assert res.flow.values == (4, 1, 0, 5)
    assert res.stats.final_cost == 11
    assert_certified(res)


def test_successive_shortest_paths_two_by_two(two_by_two):
    res = successive_shortest_paths(two_by_two)
    assert (res.value, res.cost) == (10, 11)
    assert res.flow.values == (4, 1, 0, 5)
    assert_certified(res)


def test_single_edge_full_shipment():
    net = FlowNetwork(("A", "B"), [Edge("A", "B", 5, cost=7)], {"A": 5, "B": -5})
    res = min_cost_flow(net)
    assert (res.value, res.cost) == (5, 35)


def test_supply_short_of_demand_ships_all_supply():
    net = FlowNetwork(
        ("v", "t1", "t2"),
        [Edge("v", "t1", 3, cost=1), Edge("v", "t2", 3, cost=2)],
        {"v": 3, "t1": -3, "t2": -3},
    )
    res = min_cost_flow(net)
    assert res.value == 3
    assert res.cost == 3  # all of it down the cheap edge


def test_lower_bounded_network_solved_end_to_end():
    net = FlowNetwork(
        ("A", "B"),
        [Edge("A", "B", 10, lower_bound=3, cost=2)],
        {"A": 5, "B": -5},
    )
    res = min_cost_flow(net)
    assert (res.value, res.cost) == (5, 10)
    assert res.flow.values == (5,)


def test_ssp_rejects_negative_costs():
    net = FlowNetwork(("A", "B"), [Edge("A", "B", 5, cost=-1)], {"A": 5, "B": -5})
    with pytest.raises(NetworkError):
        successive_shortest_paths(net)


def test_min_cost_flow_handles_negative_interior_cost():
    # cycle canceling has no sign restriction
    net = FlowNetwork(("A", "B"), [Edge("A", "B", 5, cost=-1)], {"A": 5, "B": -5})
    res = min_cost_flow(net)
    assert (res.value, res.cost) == (5, -5)


def test_determinism_bit_for_bit(two_by_two):
    a = min_cost_flow(two_by_two)
    b = min_cost_flow(two_by_two)
    assert a.flow.values == b.flow.values
    assert a.st_flow.values == b.st_flow.values


def test_solve_market_dispatch(two_by_two):
    assert solve_market(two_by_two).cost == 11
    assert solve_market(two_by_two, method="successive-shortest-paths").cost == 11
    with pytest.raises(ValueError):
        solve_market(two_by_two, method="simplex")


# -- demand floors --------------------------------------------------------------


def floored_fixture():
    # one village, a cheap and an expensive trader; the floor forces two
    # units onto the expensive one
    return FlowNetwork(
        ("v", "near", "far"),
        [Edge("v", "near", 5, cost=1), Edge("v", "far", 5, cost=10)],
        {"v": 5, "near": -5, "far": -5},
    )


@pytest.mark.parametrize("method", ["cycle-canceling", "successive-shortest-paths"])
def test_floor_forces_expensive_trader(method):
    res = solve_with_sink_floors(floored_fixture(), {"near": 2, "far": 2}, method)
    assert res.flow.values == (3, 2)
    assert (res.value, res.cost) == (5, 23)


def test_no_floor_starves_far_trader():
    res = min_cost_flow(floored_fixture())
    assert res.flow.values == (5, 0)
    assert res.cost == 5


def test_floor_clamped_to_demand():
    net = FlowNetwork(
        ("v", "t"),
        [Edge("v", "t", 5, cost=1)],
        {"v": 5, "t": -3},
    )
    res = solve_with_sink_floors(net, {"t": 99}, "cycle-canceling")
    assert res.value == 3


def test_infeasible_floors_raise_with_arithmetic():
    net = FlowNetwork(
        ("v", "t1", "t2", "t3"),
        [Edge("v", t, 10, cost=1) for t in ("t1", "t2", "t3")],
        {"v": 5, "t1": -10, "t2": -10, "t3": -10},
    )
    with pytest.raises(FloorInfeasibleError) as exc:
        solve_with_sink_floors(net, {"t1": 2, "t2": 2, "t3": 2}, "cycle-canceling")
    assert exc.value.required == 6
    assert exc.value.available == 5


def test_unreachable_floor_raises():
    net = FlowNetwork(
        ("v", "t1", "t2"),
        [Edge("v", "t1", 5, cost=1)],
        {"v": 5, "t1": -3, "t2": -3},
    )
    with pytest.raises(FloorInfeasibleError):
        solve_with_sink_floors(net, {"t2": 2}, "cycle-canceling")


# -- brute force guard ----------------------------------------------------------


def test_brute_force_refuses_large_instances():
    nodes = [f"v{i}" for i in range(5)] + [f"t{j}" for j in range(5)]
    balances = {f"v{i}": 6 for i in range(5)}
    balances.update({f"t{j}": -6 for j in range(5)})
    edges = [
        Edge(f"v{i}", f"t{j}", 6, cost=1) for i in range(5) for j in range(5)
    ]
    with pytest.raises(BruteForceTooLarge):
        brute_force_min_cost(FlowNetwork(nodes, edges, balances))


def test_brute_force_zero_supply():
    net = FlowNetwork(("v", "t"), [Edge("v", "t", 5, cost=3)], {"v": 0, "t": -5})
    assert brute_force_solve(net) == (0, 0)


# -- randomized cross-checks ----------------------------------------------------


def _intake(net, values):
    got = {n: 0 for n in net.nodes}
    for e, x in zip(net.edges, values):
        got[e.head] += x
    return got


def test_oracle_triangle_on_random_instances():
    rng = random.Random(1105)
    for _ in range(60):
        net = random_bipartite(rng)
        bf_value, bf_cost = brute_force_solve(net)
        cc = min_cost_flow(net)
        sp = successive_shortest_paths(net)
        assert (cc.value, cc.cost) == (bf_value, bf_cost)
        assert (sp.value, sp.cost) == (bf_value, bf_cost)
        assert_certified(cc)
        assert_certified(sp)


def brute_force_floored(net, floors):
    """Exhaustive floored optimum: (value, cost) or None when infeasible."""
    ranges = [range(e.capacity + 1) for e in net.edges]
    best = None
    feasible_exists = False
    for combo in itertools.product(*ranges):
        out = {n: 0 for n in net.nodes}
        for e, x in zip(net.edges, combo):
            out[e.tail] += x
            out[e.head] -= x
        ok = True
        for n in net.nodes:
            b = net.balance(n)
            if b > 0 and not 0 <= out[n] <= b:
                ok = False
            if b < 0 and not b <= out[n] <= 0:
                ok = False
            if b == 0 and out[n] != 0:
                ok = False
        if not ok:
            continue
        intake = {n: -out[n] for n in net.nodes if net.balance(n) < 0}
        if any(intake.get(n, 0) < min(fl, -net.balance(n)) for n, fl in floors.items()):
            continue
        feasible_exists = True
        value = sum(x for x in (out[n] for n in net.nodes if net.balance(n) > 0))
        cost = sum(e.cost * x for e, x in zip(net.edges, combo))
        key = (-value, cost)
        if best is None or key < best[0]:
            best = (key, value, cost)
    if not feasible_exists:
        return None
    return best[1], best[2]


def test_floored_solves_match_exhaustive_enumeration():
    rng = random.Random(2207)
    checked = infeasible = 0
    for _ in range(50):
        nv, nt = rng.randint(1, 2), rng.randint(1, 2)
        supplies = [rng.randint(0, 4) for _ in range(nv)]
        demands = [rng.randint(0, 4) for _ in range(nt)]
        nodes = [f"v{i}" for i in range(nv)] + [f"t{j}" for j in range(nt)]
        balances = {f"v{i}": s for i, s in enumerate(supplies)}
        balances.update({f"t{j}": -d for j, d in enumerate(demands)})
        edges = [
            Edge(f"v{i}", f"t{j}", min(supplies[i], demands[j]), cost=rng.randint(0, 9))
            for i in range(nv)
            for j in range(nt)
        ]
        net = FlowNetwork(nodes, edges, balances)
        floors = {f"t{j}": rng.randint(0, 3) for j in range(nt)}
        expected = brute_force_floored(net, floors)
        for method in ("cycle-canceling", "successive-shortest-paths"):
            if expected is None:
                with pytest.raises(FloorInfeasibleError):
                    solve_with_sink_floors(net, floors, method)
                infeasible += 1
            else:
                res = solve_with_sink_floors(net, floors, method)
                assert (res.value, res.cost) == expected
                got = _intake(net, res.flow.values)
                for t, fl in floors.items():
                    assert got[t] >= min(fl, -net.balance(t))
                checked += 1
    assert checked > 20  # the generator must actually exercise feasible cases


@given(st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_shipped_total_is_min_of_supply_and_demand(seed):
    rng = random.Random(seed)
    nv, nt = rng.randint(1, 3), rng.randint(1, 3)
    supplies = [rng.randint(0, 6) for _ in range(nv)]
    demands = [rng.randint(0, 6) for _ in range(nt)]
    nodes = [f"v{i}" for i in range(nv)] + [f"t{j}" for j in range(nt)]
    balances = {f"v{i}": s for i, s in enumerate(supplies)}
    balances.update({f"t{j}": -d for j, d in enumerate(demands)})
    edges = [
        Edge(f"v{i}", f"t{j}", min(supplies[i], demands[j]), cost=rng.randint(0, 9))
        for i in range(nv)
        for j in range(nt)
    ]
    net = FlowNetwork(nodes, edges, balances)  # fully connected on purpose
    res = min_cost_flow(net)
    assert res.value == min(sum(supplies), sum(demands))
    if sum(supplies) >= sum(demands):
        # with enough supply every trader is filled exactly
        got = _intake(net, res.flow.values)
        for j, d in enumerate(demands):
            assert got[f"t{j}"] == d
