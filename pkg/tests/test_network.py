import pytest
from hypothesis import given, settings, strategies as st

from timberflow.network import (
    SINK,
    SOURCE,
    Edge,
    Flow,
    FlowNetwork,
    FlowError,
    NetworkError,
    build_st_transform,
    flow_cost,
    lower_bound_transform,
    residual_graph,
    restore_lower_bounds,
    validate_flow,
)


def simple_net(cap=10, lb=0, cost=2, supply=5):
    return FlowNetwork(
        ("A", "B"),
        [Edge("A", "B", cap, lb, cost)],
        {"A": supply, "B": -supply},
    )


# -- construction and validation ------------------------------------------------


def test_rejects_self_loop():
    with pytest.raises(NetworkError):
        FlowNetwork(("A",), [Edge("A", "A", 1)], {"A": 0})


def test_rejects_lower_bound_above_capacity():
    with pytest.raises(NetworkError):
        FlowNetwork(("A", "B"), [Edge("A", "B", 3, lower_bound=4)], {})


def test_rejects_unknown_endpoint():
    with pytest.raises(NetworkError):
        FlowNetwork(("A",), [Edge("A", "B", 1)], {})


def test_parallel_edges_are_distinct_by_index():
    net = FlowNetwork(
        ("A", "B"),
        [Edge("A", "B", 2, cost=1), Edge("A", "B", 3, cost=9)],
        {"A": 5, "B": -5},
    )
    f = Flow((2, 3))
    assert validate_flow(net, f).ok
    assert flow_cost(net, f) == 2 * 1 + 3 * 9


def test_validate_flow_reports_capacity_violation():
    net = simple_net(cap=4)
    report = validate_flow(net, Flow((5,)))
    assert not report.ok
    assert len(report.capacity_violations) == 1
    assert report.capacity_violations[0].edge == 0


def test_validate_flow_length_mismatch_raises():
    with pytest.raises(FlowError):
        validate_flow(simple_net(), Flow((1, 2)))


def test_rerouted_unit_shows_two_balance_violations():
    # conservation is local: taking one unit off a path breaks both endpoints
    net = FlowNetwork(
        ("A", "B", "C"),
        [Edge("A", "B", 5), Edge("B", "C", 5)],
        {"A": 3, "B": 0, "C": -3},
    )
    report = validate_flow(net, Flow((3, 2)))
    offenders = {(v.node, v.observed - v.expected) for v in report.balance_violations}
    assert offenders == {("B", -1), ("C", 1)}


def test_flow_cost_frozen_values():
    assert flow_cost(simple_net(cost=2), Flow((4,))) == 8
    assert flow_cost(simple_net(), Flow((0,))) == 0


# -- s-t transformation ---------------------------------------------------------


def test_st_transform_single_edge():
    stn = build_st_transform(simple_net(cap=10, cost=2, supply=5))
    net = stn.network
    assert net.nodes[0] == SOURCE and net.nodes[-1] == SINK
    assert [(e.tail, e.head, e.capacity, e.cost) for e in net.edges] == [
        ("A", "B", 10, 2),
        (SOURCE, "A", 5, 0),
        ("B", SINK, 5, 0),
    ]
    assert all(net.balance(n) == 0 for n in net.nodes)


def test_st_transform_empty_balances():
    stn = build_st_transform(FlowNetwork(("A",), [], {"A": 0}))
    assert stn.network.edges == ()
    assert stn.network.nodes == (SOURCE, "A", SINK)


def test_st_transform_rejects_lower_bounds():
    with pytest.raises(NetworkError):
        build_st_transform(simple_net(lb=1))


def test_st_transform_capacity_totals(two_by_two):
    stn = build_st_transform(two_by_two)
    source_caps = sorted(stn.network.edges[i].capacity for i in stn.source_edges.values())
    sink_caps = sorted(stn.network.edges[i].capacity for i in stn.sink_edges.values())
    assert source_caps == [5, 5]
    assert sink_caps == [4, 6]
    # interior edges copied verbatim, in order
    assert stn.network.edges[: stn.interior_count] == two_by_two.edges


# -- lower-bound elimination ----------------------------------------------------


def test_lower_bound_transform_single_edge():
    net = simple_net(cap=10, lb=3, cost=2, supply=5)
    out, offset = lower_bound_transform(net)
    assert out.edges == (Edge("A", "B", 7, 0, 2),)
    assert out.balance("A") == 2 and out.balance("B") == -2
    assert offset == 6


def test_lower_bound_transform_identity():
    net = simple_net()
    out, offset = lower_bound_transform(net)
    assert out.edges == net.edges
    assert {n: out.balance(n) for n in out.nodes} == {"A": 5, "B": -5}
    assert offset == 0


def test_lower_bound_transform_trader_floors():
    # one hub feeding three floored sinks at unit costs 1, 2, 3
    net = FlowNetwork(
        ("hub", "t1", "t2", "t3"),
        [
            Edge("hub", "t1", 2, 2, 1),
            Edge("hub", "t2", 2, 2, 2),
            Edge("hub", "t3", 2, 2, 3),
        ],
        {"hub": 6, "t1": -2, "t2": -2, "t3": -2},
    )
    out, offset = lower_bound_transform(net)
    assert offset == 2 * 1 + 2 * 2 + 2 * 3
    assert all(out.balance(t) == 0 for t in ("t1", "t2", "t3"))
    assert out.balance("hub") == 0


def test_restore_lower_bounds_round_trip():
    net = simple_net(cap=10, lb=3, cost=2, supply=5)
    out, offset = lower_bound_transform(net)
    restored = restore_lower_bounds(net, Flow((2,)))
    assert restored.values == (5,)
    assert flow_cost(net, restored) == flow_cost(out, Flow((2,))) + offset


# -- residual graphs ------------------------------------------------------------


def test_residual_arcs_for_partial_flow():
    net = simple_net(cap=10, cost=2, supply=4)
    res = residual_graph(net, Flow((4,)))
    assert [(a.tail, a.head, a.residual, a.cost, a.forward) for a in res.arcs] == [
        ("A", "B", 6, 2, True),
        ("B", "A", 4, -2, False),
    ]


def test_saturated_edge_has_only_backward_arc():
    net = simple_net(cap=4, cost=2, supply=4)
    res = residual_graph(net, Flow((4,)))
    assert len(res.arcs) == 1 and not res.arcs[0].forward


def test_residual_rejects_infeasible_flow():
    with pytest.raises(FlowError):
        residual_graph(simple_net(cap=4), Flow((5,)))


def test_residual_ordering_forward_block_then_backward(two_by_two):
    f = Flow((4, 1, 0, 5))
    res = residual_graph(two_by_two, f)
    flags = [a.forward for a in res.arcs]
    assert flags == sorted(flags, reverse=True)  # all forward arcs first
    fwd = [a.edge for a in res.arcs if a.forward]
    bwd = [a.edge for a in res.arcs if not a.forward]
    assert fwd == sorted(fwd) and bwd == sorted(bwd)


# -- property tests -------------------------------------------------------------


@st.composite
def bounded_network_and_flow(draw):
    """Random <= 6 node network with lower bounds plus an in-bounds flow.

    Balances are derived from the flow itself, so the flow is always feasible.
    """
    n = draw(st.integers(2, 6))
    nodes = [f"n{i}" for i in range(n)]
    m = draw(st.integers(1, 10))
    edges = []
    flows = []
    for _ in range(m):
        a, b = draw(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(
                lambda t: t[0] != t[1]
            )
        )
        lb = draw(st.integers(0, 5))
        cap = lb + draw(st.integers(0, 5))
        cost = draw(st.integers(0, 9))
        edges.append(Edge(nodes[a], nodes[b], cap, lb, cost))
        flows.append(draw(st.integers(lb, cap)))
    balances = {nd: 0 for nd in nodes}
    for e, x in zip(edges, flows):
        balances[e.tail] += x
        balances[e.head] -= x
    return FlowNetwork(nodes, edges, balances), Flow(tuple(flows))


@given(bounded_network_and_flow())
@settings(max_examples=120, deadline=None)
def test_lower_bound_round_trip_preserves_cost(net_flow):
    net, f = net_flow
    out, offset = lower_bound_transform(net)
    shifted = Flow(tuple(x - e.lower_bound for x, e in zip(f.values, net.edges)))
    assert validate_flow(out, shifted).ok
    assert flow_cost(out, shifted) + offset == flow_cost(net, f)
    assert restore_lower_bounds(net, shifted).values == f.values


@given(bounded_network_and_flow())
@settings(max_examples=120, deadline=None)
def test_residual_partition_of_slack(net_flow):
    net, f = net_flow
    res = residual_graph(net, f)
    assert all(a.residual > 0 for a in res.arcs)
    by_edge = {}
    for a in res.arcs:
        by_edge.setdefault(a.edge, 0)
        by_edge[a.edge] += a.residual
    for i, e in enumerate(net.edges):
        assert by_edge.get(i, 0) == e.capacity - e.lower_bound


@given(bounded_network_and_flow(), st.randoms(use_true_random=False))
@settings(max_examples=120, deadline=None)
def test_validate_flow_matches_direct_recomputation(net_flow, rng):
    net, f = net_flow
    # perturb some entries so both feasible and infeasible flows get exercised
    values = list(f.values)
    for i in range(len(values)):
        if rng.random() < 0.3:
            values[i] += rng.choice((-2, -1, 1, 2))
    cand = Flow(tuple(values))
    report = validate_flow(net, cand)

    cap_bad = [
        i
        for i, (e, x) in enumerate(zip(net.edges, values))
        if not e.lower_bound <= x <= e.capacity
    ]
    outflow = {n: 0 for n in net.nodes}
    for e, x in zip(net.edges, values):
        outflow[e.tail] += x
        outflow[e.head] -= x
    bal_bad = [n for n in net.nodes if outflow[n] != net.balance(n)]

    reported_edges = sorted(
        {v.edge for v in report.capacity_violations}
        | {v.edge for v in report.lower_bound_violations}
    )
    assert reported_edges == cap_bad
    assert sorted(v.node for v in report.balance_violations) == sorted(bal_bad)
    assert report.ok == (not cap_bad and not bal_bad)
