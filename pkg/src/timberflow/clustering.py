"""Trader demand classes via agglomerative Ward clustering on one scalar.

Ward's merge cost for clusters A, B with sizes a, b and demand sums Sa, Sb
is (a*b / (a+b)) * (Sa/a - Sb/b)^2 = (Sa*b - Sb*a)^2 / (a*b*(a+b)).  With
integer demands both numerator and denominator are exact integers, so merge
decisions compare rationals with no float rounding anywhere.  Ties merge
the pair with the lowest original member indices, making the dendrogram a
pure function of the input order.

The class labels follow ascending cluster means; for the standard five
classes they read very-low through very-high.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .market import MarketInstance, MarketSolution, optimize_market
from .solver import SolverName

FIVE_CLASS_LABELS = ("very-low", "low", "medium", "high", "very-high")


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Merge:
    """One dendrogram step; members are original trader indices."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    height: Fraction


@dataclass(frozen=True)
class TraderCluster:
    label: str
    members: tuple[str, ...]
    total: int
    size: int

    @property
    def mean(self) -> Fraction:
        return Fraction(self.total, self.size)


@dataclass(frozen=True)
class ClusterModel:
    """Trader partition with its merge trace; clusters in ascending-mean order."""

    clusters: tuple[TraderCluster, ...]
    merges: tuple[Merge, ...]

    @property
    def labels(self) -> dict[str, str]:
        return {t: c.label for c in self.clusters for t in c.members}


@dataclass(frozen=True)
class ModeratedDemands:
    """Integer permits at cluster averages; cluster totals conserved exactly."""

    permits: dict[str, int]
    conservation: tuple[tuple[str, int, int], ...]  # (label, original, permitted)


def class_labels(k: int) -> tuple[str, ...]:
    if k == 5:
        return FIVE_CLASS_LABELS
    return tuple(f"class-{i + 1}" for i in range(k))


def _merge_cost(a: int, sa: int, b: int, sb: int) -> Fraction:
    return Fraction((sa * b - sb * a) ** 2, a * b * (a + b))


def cluster_traders(demands: Mapping[str, int], k: int = 5) -> ClusterModel:
    """Agglomerate trader demand scalars down to k clusters.

    Input order fixes the member indices used by the tie rule, so pass
    demands in a stable order (dataset order).
    """
    ids = list(demands)
    n = len(ids)
    if n < k:
        raise ClusteringError(f"need at least {k} traders, got {n}")
    if k < 1:
        raise ClusteringError("k must be positive")
    for t, d in demands.items():
        if d < 0:
            raise ClusteringError(f"negative demand for trader {t!r}")

    # active clusters as (sorted member indices, size, demand sum)
    clusters: list[tuple[tuple[int, ...], int, int]] = [
        ((i,), 1, int(demands[ids[i]])) for i in range(n)
    ]
    merges: list[Merge] = []
    while len(clusters) > k:
        best = None
        for i in range(len(clusters)):
            mi, ai, si = clusters[i]
            for j in range(i + 1, len(clusters)):
                mj, aj, sj = clusters[j]
                cost = _merge_cost(ai, si, aj, sj)
                lo, hi = sorted((mi[0], mj[0]))
                key = (cost, lo, hi)
                if best is None or key < best[0]:
                    best = (key, i, j)
        (cost, _, _), i, j = best
        mi, ai, si = clusters[i]
        mj, aj, sj = clusters[j]
        left, right = (mi, mj) if mi[0] < mj[0] else (mj, mi)
        merges.append(Merge(left, right, cost))
        merged = (tuple(sorted(mi + mj)), ai + aj, si + sj)
        del clusters[j], clusters[i]
        clusters.append(merged)

    for prev, cur in zip(merges, merges[1:]):
        # Ward is reducible, so the dendrogram can never invert
        assert prev.height <= cur.height, "merge heights decreased"

    ordered = sorted(clusters, key=lambda c: (Fraction(c[2], c[1]), c[0][0]))
    labels = class_labels(k)
    out = tuple(
        TraderCluster(
            label=labels[pos],
            members=tuple(ids[i] for i in members),
            total=total,
            size=size,
        )
        for pos, (members, size, total) in enumerate(ordered)
    )
    return ClusterModel(out, tuple(merges))


def moderate_demands(model: ClusterModel, demands: Mapping[str, int]) -> ModeratedDemands:
    """Flatten each cluster's members to the cluster average.

    The average is rarely integral; the first (total mod size) members in
    input order take the extra unit so each cluster's total is conserved
    exactly, and with it the global total.
    """
    ids = list(demands)
    index = {t: i for i, t in enumerate(ids)}
    permits: dict[str, int] = {}
    conservation = []
    for c in model.clusters:
        for t in c.members:
            if t not in index:
                raise ClusteringError(f"cluster member {t!r} missing from demands")
        members = sorted(c.members, key=lambda t: index[t])
        original = sum(demands[t] for t in members)
        base, extra = divmod(original, len(members))
        for pos, t in enumerate(members):
            permits[t] = base + 1 if pos < extra else base
        conservation.append((c.label, original, sum(permits[t] for t in members)))
    if set(permits) != set(ids):
        missing = sorted(set(ids) - set(permits))
        raise ClusteringError(f"clusters do not cover traders {missing[:5]}")
    permits = {t: permits[t] for t in ids}
    return ModeratedDemands(permits, tuple(conservation))


@dataclass(frozen=True)
class ClusteredSolution:
    base: MarketSolution
    clustered: MarketSolution
    model: ClusterModel
    moderated: ModeratedDemands

    @property
    def cost_ratio(self) -> float:
        return self.clustered.cost / self.base.cost if self.base.cost else 1.0


def clustered_optimize(
    inst: MarketInstance,
    model: ClusterModel | None = None,
    method: SolverName = "cycle-canceling",
) -> ClusteredSolution:
    """Optimize as-is and again with demands moderated to cluster averages."""
    if model is None:
        model = cluster_traders(inst.demands)
    moderated = moderate_demands(model, inst.demands)
    base = optimize_market(inst, method=method)
    clustered = optimize_market(inst, demands=moderated.permits, method=method)
    return ClusteredSolution(base, clustered, model, moderated)
