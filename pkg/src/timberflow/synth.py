"""Seeded generator for district-scale synthetic datasets.

Produces a complete dataset directory (villages, farms, traders,
transactions, yields, road files and a precomputed distance matrix) whose
history is deliberately suboptimal: farmers pick traders by distance decay
distorted with heavy pair-level noise, so the observed transport cost sits
well above the optimum.  Harvests run at 70-100% of standing stock per
village, leaving enough slack that a baseline run satisfies all demand
while a 25% supply cut produces real shortfalls.

All randomness flows through one ``random.Random(seed)``; file contents are
formatted with fixed decimal widths, so a given (params, seed) pair yields
byte-identical output every time.  Ground truth (per-type yields, harvest
factors, per-village potential) lands in ``synth_truth.json``, which the
dataset loader ignores and the fingerprint excludes.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .roads import (
    RoadEdge,
    RoadGraph,
    Site,
    euclid,
    merge_road_graphs,
    natural_key,
    od_cost_matrix,
)

#: trees per hectare by land use, before the per-seed +-10% jitter
BASE_YIELDS = {
    "khair-dense": 6.0,
    "khair-open": 3.5,
    "agroforestry": 2.0,
    "scrub": 0.8,
}

#: land-use shares used when assigning farm plots
LAND_USE_MIX = (
    ("khair-dense", 0.25),
    ("khair-open", 0.30),
    ("agroforestry", 0.25),
    ("scrub", 0.20),
)


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthParams:
    """Defaults match the study district: 304 villages, 154 traders,
    5911 farm plots, 9481 recorded transactions."""

    villages: int = 304
    traders: int = 154
    farms: int = 5911
    transactions: int = 9481
    district_km: float = 60.0
    road_nodes: int = 420
    decay_km: float = 15.0
    noise_sigma: float = 1.2
    harvest_lo: float = 0.7
    harvest_hi: float = 1.0
    area_lo: float = 0.2
    area_hi: float = 4.0

    def __post_init__(self) -> None:
        if self.villages < 1:
            raise SynthError("need at least one village")
        if self.traders < 1:
            raise SynthError("need at least one trader")
        if self.farms < 1:
            raise SynthError("need at least one farm")
        if self.transactions < 0:
            raise SynthError("transactions must be >= 0")
        if self.road_nodes < 4:
            raise SynthError("need at least four road nodes")
        if self.district_km <= 0:
            raise SynthError("district_km must be positive")
        if not 0 < self.harvest_lo <= self.harvest_hi <= 1:
            raise SynthError("harvest range must satisfy 0 < lo <= hi <= 1")
        if not 0 < self.area_lo <= self.area_hi:
            raise SynthError("area range must satisfy 0 < lo <= hi")


def _apportion(total: int, weights: list[float]) -> list[int]:
    """Split ``total`` into integer parts proportional to ``weights``
    (largest remainder, ties to the lower index)."""
    wsum = sum(weights)
    if wsum <= 0 or total <= 0:
        return [0] * len(weights)
    shares = [total * w / wsum for w in weights]
    base = [int(s) for s in shares]
    extra = total - sum(base)
    order = sorted(range(len(weights)), key=lambda i: (-(shares[i] - base[i]), i))
    for i in order[:extra]:
        base[i] += 1
    return base


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


# -- road network ---------------------------------------------------------------


def _fine_grid(rng: random.Random, p: SynthParams) -> RoadGraph:
    """Jittered grid with most orthogonal links plus a few diagonals,
    patched to a single connected component."""
    side = p.district_km * 1000.0
    g = math.ceil(math.sqrt(p.road_nodes))
    cell = side / g
    coords: dict[str, tuple[float, float]] = {}
    for i in range(p.road_nodes):
        r, c = divmod(i, g)
        x = (c + 0.5 + rng.uniform(-0.35, 0.35)) * cell
        y = (r + 0.5 + rng.uniform(-0.35, 0.35)) * cell
        coords[f"n{i}"] = (round(x, 1), round(y, 1))

    def length(a: str, b: str, wiggle: float) -> float:
        return max(1.0, round(euclid(coords[a], coords[b]) * wiggle, 1))

    edges: list[RoadEdge] = []
    for i in range(p.road_nodes):
        r, c = divmod(i, g)
        for j, keep in ((i + 1, c + 1 < g), (i + g, True), (i + g + 1, c + 1 < g)):
            if not keep or j >= p.road_nodes:
                continue
            prob = 0.12 if j == i + g + 1 else 0.92
            if rng.random() < prob:
                wiggle = rng.uniform(1.0, 1.3)
                edges.append(RoadEdge(f"n{i}", f"n{j}", length(f"n{i}", f"n{j}", wiggle)))

    # stitch any stray components onto the one containing n0
    parent = {n: n for n in coords}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges:
        parent[find(e.a)] = find(e.b)
    comps: dict[str, list[str]] = {}
    for n in sorted(coords, key=natural_key):
        comps.setdefault(find(n), []).append(n)
    groups = sorted(comps.values(), key=lambda ns: natural_key(ns[0]))
    main = groups[0]
    for extra in groups[1:]:
        a = extra[0]
        b = min(main, key=lambda n: (euclid(coords[a], coords[n]), natural_key(n)))
        edges.append(RoadEdge(a, b, length(a, b, 1.2)))
        main.extend(extra)
    return RoadGraph(coords, edges)


def _coarse_overlay(
    rng: random.Random, fine: RoadGraph, p: SynthParams
) -> tuple[RoadGraph, list[str]]:
    """Highway spine east of the district.

    Two gateway nodes sit within 150 m of fine nodes so the loader's 250 m
    merge absorbs them; the remote spine nodes survive the merge and give
    out-of-district traders a road home.  Returns (overlay, remote ids).
    """
    side = p.district_km * 1000.0
    fine_ids = sorted(fine.coords, key=natural_key)
    g1, g2 = rng.sample(fine_ids, 2)
    coords: dict[str, tuple[float, float]] = {}
    for cid, ref in (("c0", g1), ("c1", g2)):
        fx, fy = fine.coords[ref]
        coords[cid] = (
            round(fx + rng.uniform(-100, 100), 1),
            round(fy + rng.uniform(-100, 100), 1),
        )
    remote = ["c2", "c3", "c4"]
    for k, cid in enumerate(remote):
        coords[cid] = (
            round(side + rng.uniform(5000, 12000), 1),
            round((k + 0.5) * side / len(remote) + rng.uniform(-3000, 3000), 1),
        )
    pairs = [("c0", "c2"), ("c1", "c4"), ("c2", "c3"), ("c3", "c4")]
    edges = [
        RoadEdge(a, b, max(1.0, round(euclid(coords[a], coords[b]) * 1.1, 1)), "coarse")
        for a, b in pairs
    ]
    return RoadGraph(coords, edges), remote


# -- file emission --------------------------------------------------------------


def _road_file_text(g: RoadGraph) -> str:
    lines = ["node_id,x,y"]
    for n in sorted(g.coords, key=natural_key):
        x, y = g.coords[n]
        lines.append(f"{n},{x:.1f},{y:.1f}")
    for e in g.edges:
        lines.append(f"edge,{e.a},{e.b},{e.length_m:.1f}")
    return "\n".join(lines) + "\n"


def _point_file_text(id_col: str, rows: list[tuple[str, float, float]]) -> str:
    lines = [f"{id_col},x,y"]
    for ident, x, y in rows:
        lines.append(f"{ident},{x:.1f},{y:.1f}")
    return "\n".join(lines) + "\n"


# -- generation -----------------------------------------------------------------


def generate_dataset(
    out_dir: str | Path, params: SynthParams = SynthParams(), seed: int = 0
) -> Path:
    """Write a synthetic dataset directory and return its path."""
    p = params
    rng = random.Random(seed)
    side = p.district_km * 1000.0
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)

    fine = _fine_grid(rng, p)
    coarse, remote_nodes = _coarse_overlay(rng, fine, p)
    merged = merge_road_graphs(fine, coarse)

    # villages cluster around rural hubs; traders around a few market towns,
    # plus a handful out along the highway spine
    hubs = [
        (rng.uniform(0.1, 0.9) * side, rng.uniform(0.1, 0.9) * side)
        for _ in range(max(3, p.villages // 40))
    ]
    villages: list[tuple[str, float, float]] = []
    for i in range(p.villages):
        hx, hy = rng.choice(hubs)
        villages.append(
            (
                f"v{i + 1}",
                round(_clamp(rng.gauss(hx, 3500), 0, side), 1),
                round(_clamp(rng.gauss(hy, 3500), 0, side), 1),
            )
        )

    towns = [
        (rng.uniform(0.15, 0.85) * side, rng.uniform(0.15, 0.85) * side)
        for _ in range(max(2, p.traders // 30))
    ]
    n_remote = 3 if p.traders > 8 else 0
    traders: list[tuple[str, float, float]] = []
    for i in range(p.traders - n_remote):
        tx, ty = rng.choice(towns)
        traders.append(
            (
                f"t{i + 1}",
                round(_clamp(rng.gauss(tx, 1200), 0, side), 1),
                round(_clamp(rng.gauss(ty, 1200), 0, side), 1),
            )
        )
    for k in range(n_remote):
        nx, ny = merged.coords[remote_nodes[k]]
        traders.append(
            (
                f"t{p.traders - n_remote + k + 1}",
                round(nx + rng.uniform(-200, 200), 1),
                round(ny + rng.uniform(-200, 200), 1),
            )
        )

    od = od_cost_matrix(
        [Site(i, x, y) for i, x, y in villages],
        [Site(i, x, y) for i, x, y in traders],
        merged,
    )

    # farm plots: counts per village by largest remainder, then type and area
    village_weights = [rng.uniform(0.5, 1.5) for _ in villages]
    farm_counts = _apportion(p.farms, village_weights)
    type_names = [t for t, _ in LAND_USE_MIX]
    type_weights = [w for _, w in LAND_USE_MIX]
    farms: list[tuple[str, str, str, float]] = []
    k = 0
    for (vid, _, _), count in zip(villages, farm_counts):
        for _ in range(count):
            k += 1
            lut = rng.choices(type_names, weights=type_weights)[0]
            area = round(rng.uniform(p.area_lo, p.area_hi), 2)
            farms.append((f"f{k}", vid, lut, area))

    yields = {t: round(base * rng.uniform(0.9, 1.1), 3) for t, base in BASE_YIELDS.items()}

    potential: dict[str, float] = {vid: 0.0 for vid, _, _ in villages}
    for _, vid, lut, area in farms:
        potential[vid] += yields[lut] * area
    harvest_factor = {vid: round(rng.uniform(p.harvest_lo, p.harvest_hi), 4) for vid, _, _ in villages}
    targets = {vid: int(harvest_factor[vid] * potential[vid]) for vid, _, _ in villages}
    total_target = sum(targets.values())
    if p.transactions > total_target:
        raise SynthError(
            f"cannot spread {p.transactions} transactions over {total_target} "
            "harvestable trees; lower transactions or raise yields"
        )

    # trader appeal per village: distance decay warped by persistent pair noise,
    # which is what keeps the recorded history away from the optimum
    trader_ids = [t for t, _, _ in traders]
    appeal: dict[str, list[float]] = {}
    for vid, _, _ in villages:
        row = []
        for tid in trader_ids:
            d = od.distance(vid, tid)
            if d < 0:
                row.append(0.0)
            else:
                row.append(
                    math.exp(-d / (p.decay_km * 1000.0) + rng.gauss(0.0, p.noise_sigma))
                )
        appeal[vid] = row

    farms_by_village: dict[str, list[tuple[str, float]]] = {vid: [] for vid, _, _ in villages}
    for fid, vid, lut, area in farms:
        farms_by_village[vid].append((fid, yields[lut] * area))

    txn_counts = _apportion(p.transactions, [targets[vid] for vid, _, _ in villages])
    for i, (vid, _, _) in enumerate(villages):
        txn_counts[i] = min(txn_counts[i], targets[vid])
    short = p.transactions - sum(txn_counts)
    while short > 0:
        spare = sorted(
            range(len(villages)),
            key=lambda i: (-(targets[villages[i][0]] - txn_counts[i]), i),
        )
        moved = False
        for i in spare:
            if short == 0:
                break
            if txn_counts[i] < targets[villages[i][0]]:
                txn_counts[i] += 1
                short -= 1
                moved = True
        if not moved:  # pragma: no cover - guarded by the total_target check
            raise SynthError("could not place all transactions")

    txns: list[tuple[str, str, str, int, str, str, str]] = []
    serial = 0
    for (vid, _, _), count in zip(villages, txn_counts):
        if count == 0:
            continue
        # positive integer split of the harvest with a cubed-weight heavy tail
        skew = [rng.random() ** 3 + 1e-9 for _ in range(count)]
        sizes = [1 + extra for extra in _apportion(targets[vid] - count, skew)]
        # count >= 1 implies a positive harvest target, hence productive farms
        fids = [f for f, _ in farms_by_village[vid]]
        fw = [w for _, w in farms_by_village[vid]]
        if sum(appeal[vid]) <= 0:
            raise SynthError(f"village {vid} cannot reach any trader by road")
        for trees in sizes:
            serial += 1
            tid = rng.choices(trader_ids, weights=appeal[vid])[0]
            fid = rng.choices(fids, weights=fw)[0]
            uprooted = str(rng.randint(0, trees)) if rng.random() < 0.3 else ""
            volume = (
                f"{trees * rng.uniform(0.08, 0.2):.3f}" if rng.random() < 0.2 else ""
            )
            txns.append((f"x{serial}", vid, tid, trees, uprooted, volume, fid))

    (root / "villages.csv").write_text(_point_file_text("village_id", villages), encoding="utf-8")
    (root / "traders.csv").write_text(_point_file_text("trader_id", traders), encoding="utf-8")
    farm_lines = ["farm_id,village_id,land_use_type,area_ha"]
    farm_lines += [f"{fid},{vid},{lut},{area:.2f}" for fid, vid, lut, area in farms]
    (root / "farms.csv").write_text("\n".join(farm_lines) + "\n", encoding="utf-8")
    txn_lines = ["txn_id,village_id,trader_id,trees_harvested,trees_uprooted,volume_m3,farm_id"]
    txn_lines += [f"{x},{v},{t},{n},{u},{m},{f}" for x, v, t, n, u, m, f in txns]
    (root / "transactions.csv").write_text("\n".join(txn_lines) + "\n", encoding="utf-8")
    yield_lines = ["land_use_type,trees_per_ha"]
    yield_lines += [f"{t},{y:.3f}" for t, y in yields.items()]
    (root / "yields.csv").write_text("\n".join(yield_lines) + "\n", encoding="utf-8")
    (root / "roads.csv").write_text(_road_file_text(fine), encoding="utf-8")
    (root / "roads_coarse.csv").write_text(_road_file_text(coarse), encoding="utf-8")
    (root / "od_matrix.csv").write_text(od.to_csv(), encoding="utf-8")
    truth = {
        "seed": seed,
        "yields": yields,
        "harvest_factor": harvest_factor,
        "potential": {vid: round(pot, 3) for vid, pot in potential.items()},
        "target_harvest": targets,
    }
    (root / "synth_truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return root
