"""Report figures, rendered headlessly to image files.

Figures sit alongside the delimited exports but stay out of any
byte-equality contract: image encoding varies across matplotlib builds.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dataset import Dataset
from .market import PLANT_PRIORITY, SATISFIED
from .scenario import ScenarioResult, SurvivalCurve

PRIORITY_COLORS = {PLANT_PRIORITY: "forestgreen", SATISFIED: "firebrick"}


def survival_figure(curves: Mapping[str, SurvivalCurve], path: str | Path) -> Path:
    """Step plot of every survival curve.

    Levels extend left from each point: the share at or above v is constant
    on the interval leading into each recorded value, so the drawn steps
    never sit above the data.
    """
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in sorted(curves):
        curve = curves[name]
        xs = [v for v, _ in curve.points]
        ys = [ge / curve.n for _, ge in curve.points]
        ax.step(xs, ys, where="pre", label=name)
    ax.set_xlabel("trees")
    ax.set_ylabel("share at or above")
    ax.set_ylim(0, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def _site_arrays(ds: Dataset) -> tuple[dict, dict]:
    villages = {v.id: (v.x, v.y) for v in ds.villages}
    traders = {t.id: (t.x, t.y) for t in ds.traders}
    return villages, traders


def flow_map_figure(ds: Dataset, result: ScenarioResult, path: str | Path) -> Path:
    """Optimized shipments as straight village-trader segments, width by volume."""
    villages, traders = _site_arrays(ds)
    fig, ax = plt.subplots(figsize=(7, 7))
    peak = max((x for _, _, x in result.pair_flows), default=1)
    for vid, tid, trees in result.pair_flows:
        (vx, vy), (tx, ty) = villages[vid], traders[tid]
        ax.plot(
            [vx, tx], [vy, ty],
            color="saddlebrown",
            linewidth=0.3 + 2.5 * trees / peak,
            alpha=0.55,
            zorder=1,
        )
    ax.scatter(*zip(*villages.values()), s=8, c="dimgray", label="villages", zorder=2)
    ax.scatter(
        *zip(*traders.values()), s=30, c="royalblue", marker="s", label="traders", zorder=3
    )
    ax.set_aspect("equal")
    ax.set_xlabel("metres east")
    ax.set_ylabel("metres north")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def priority_map_figure(ds: Dataset, result: ScenarioResult, path: str | Path) -> Path:
    """Villages colored by replanting priority."""
    villages, traders = _site_arrays(ds)
    by_label: dict[str, list[tuple[float, float]]] = {PLANT_PRIORITY: [], SATISFIED: []}
    for row in result.priorities:
        by_label.setdefault(row.label, []).append(villages[row.village_id])
    fig, ax = plt.subplots(figsize=(7, 7))
    for label in (PLANT_PRIORITY, SATISFIED):
        pts = by_label.get(label)
        if pts:
            ax.scatter(*zip(*pts), s=18, c=PRIORITY_COLORS[label], label=label, zorder=2)
    ax.scatter(
        *zip(*traders.values()), s=14, c="lightsteelblue", marker="s", label="traders", zorder=1
    )
    ax.set_aspect("equal")
    ax.set_xlabel("metres east")
    ax.set_ylabel("metres north")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def write_figures(out_dir: str | Path, ds: Dataset, result: ScenarioResult) -> list[Path]:
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    return [
        survival_figure(result.curves, root / "survival.png"),
        flow_map_figure(ds, result, root / "flow_map.png"),
        priority_map_figure(ds, result, root / "priority_map.png"),
    ]
