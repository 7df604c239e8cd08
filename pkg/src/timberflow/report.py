"""Canonical report documents and their flat-table exports.

A report is one JSON document with sorted keys, two-space indentation and a
trailing newline, so the same (dataset, config) pair always renders to the
same bytes.  Nothing time- or host-dependent goes in; costs appear both as
exact integer tree-metres and as tree-km for display.  Parsing an emitted
report reproduces the in-memory result exactly, and re-rendering the parse
reproduces the bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .market import tree_km
from .scenario import ScenarioResult

SCHEMA_VERSION = "1"


class ReportError(ValueError):
    pass


def render_report(result: ScenarioResult, fingerprint: str) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "dataset_fingerprint": fingerprint,
        "display": {
            "optimized_tree_km": tree_km(result.optimized_cost),
            "actual_tree_km": tree_km(result.actual_cost),
        },
        "result": result.to_dict(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> tuple[ScenarioResult, str]:
    """Return (result, dataset fingerprint) from a rendered document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"not a report document: {exc}") from exc
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ReportError("not a report document: missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ReportError(
            f"unsupported schema_version {doc['schema_version']!r}; "
            f"this build reads {SCHEMA_VERSION!r}"
        )
    try:
        return ScenarioResult.from_dict(doc["result"]), doc["dataset_fingerprint"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportError(f"malformed report body: {exc}") from exc


# -- flat tables ----------------------------------------------------------------


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def flows_csv(result: ScenarioResult) -> str:
    return _csv(["village_id", "trader_id", "trees"], result.pair_flows)


def permits_csv(result: ScenarioResult) -> str:
    return _csv(["trader_id", "village_id", "trees"], result.permits)


def priorities_csv(result: ScenarioResult) -> str:
    return _csv(
        ["village_id", "optimal_trees", "actual_trees", "delta", "label"],
        (
            (p.village_id, p.optimal_trees, p.actual_trees, p.delta, p.label)
            for p in result.priorities
        ),
    )


def clusters_csv(result: ScenarioResult) -> str:
    if result.cluster is None:
        raise ReportError("result has no clustering section")
    return _csv(["trader_id", "cluster_label", "original_demand", "permit"], result.cluster.rows)


def curves_csv(result: ScenarioResult) -> str:
    """All survival curves in one long table, ready for plotting tools."""
    rows = []
    for name in sorted(result.curves):
        curve = result.curves[name]
        for value, ge in curve.points:
            rows.append((name, value, ge, ge / curve.n))
    return _csv(["curve", "value", "count_at_or_above", "fraction"], rows)


def write_report_files(out_dir: str | Path, result: ScenarioResult, fingerprint: str) -> list[Path]:
    """Write report.json plus every applicable table; returns written paths."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    files = {
        "report.json": render_report(result, fingerprint),
        "flows.csv": flows_csv(result),
        "permits.csv": permits_csv(result),
        "priorities.csv": priorities_csv(result),
        "curves.csv": curves_csv(result),
    }
    if result.cluster is not None:
        files["clusters.csv"] = clusters_csv(result)
    written = []
    for name, text in files.items():
        path = root / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
