"""Shared fixtures: the 2x2 reference market and random instance builders."""

from __future__ import annotations

import random

import pytest

from timberflow.network import Edge, FlowNetwork, validate_flow
from timberflow.solver import SolveResult, optimality_certificate


@pytest.fixture(autouse=True)
def _no_ambient_report_cache(monkeypatch):
    # a developer's cache dir must not feed stale reports into byte-level tests
    monkeypatch.delenv("TIMBERFLOW_CACHE", raising=False)


def build_two_by_two() -> FlowNetwork:
    """Two villages (supply 5 each), two traders (demand 4 and 6).

    Unit costs [[1, 2], [3, 1]]; min cost is 11 at flows (4, 1, 0, 5).
    """
    balances = {"v1": 5, "v2": 5, "t1": -4, "t2": -6}
    costs = {("v1", "t1"): 1, ("v1", "t2"): 2, ("v2", "t1"): 3, ("v2", "t2"): 1}
    edges = [
        Edge(v, t, capacity=min(balances[v], -balances[t]), cost=c)
        for (v, t), c in costs.items()
    ]
    return FlowNetwork(("v1", "v2", "t1", "t2"), edges, balances)


@pytest.fixture
def two_by_two() -> FlowNetwork:
    return build_two_by_two()


def random_bipartite(
    rng: random.Random,
    max_villages: int = 4,
    max_traders: int = 3,
    max_units: int = 6,
    max_cost: int = 10,
) -> FlowNetwork:
    nv = rng.randint(1, max_villages)
    nt = rng.randint(1, max_traders)
    supplies = [rng.randint(0, max_units) for _ in range(nv)]
    demands = [rng.randint(0, max_units) for _ in range(nt)]
    nodes = [f"v{i}" for i in range(nv)] + [f"t{j}" for j in range(nt)]
    balances = {f"v{i}": s for i, s in enumerate(supplies)}
    balances.update({f"t{j}": -d for j, d in enumerate(demands)})
    edges = []
    for i in range(nv):
        for j in range(nt):
            if rng.random() < 0.85:  # leave some pairs unconnected
                cap = min(supplies[i], demands[j])
                edges.append(Edge(f"v{i}", f"t{j}", cap, cost=rng.randint(0, max_cost)))
    return FlowNetwork(nodes, edges, balances)


def assert_certified(result: SolveResult) -> None:
    """Optimal solve: clean flow in solved space and no negative residual cycle."""
    report = validate_flow(result.st_network, result.st_flow)
    assert report.ok, report.first_message()
    assert optimality_certificate(result)
