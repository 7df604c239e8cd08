"""Canonical report rendering, parsing, flat tables, and figures."""

import json
from pathlib import Path

import pytest

from timberflow.dataset import load_dataset
from timberflow.figures import write_figures
from timberflow.market import build_instance
from timberflow.report import (
    SCHEMA_VERSION,
    ReportError,
    clusters_csv,
    curves_csv,
    flows_csv,
    parse_report,
    permits_csv,
    priorities_csv,
    render_report,
    write_report_files,
)
from timberflow.scenario import ScenarioConfig, run_scenario
from timberflow.synth import SynthParams, generate_dataset

ORACLE_DS = Path(__file__).parent / "data" / "oracle_ds"
GOLDEN = Path(__file__).parent / "data" / "golden_report.json"


@pytest.fixture(scope="module")
def oracle_ds():
    return load_dataset(ORACLE_DS)


@pytest.fixture(scope="module")
def baseline(oracle_ds):
    return run_scenario(build_instance(oracle_ds), ScenarioConfig())


def test_rendered_document_is_canonical(baseline, oracle_ds):
    text = render_report(baseline, oracle_ds.fingerprint)
    assert text.endswith("\n")
    doc = json.loads(text)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["dataset_fingerprint"] == oracle_ds.fingerprint
    # sorted keys at every level make the bytes reproducible
    assert text == json.dumps(doc, indent=2, sort_keys=True) + "\n"


def test_display_costs_are_tree_km(baseline, oracle_ds):
    doc = json.loads(render_report(baseline, oracle_ds.fingerprint))
    assert doc["display"]["optimized_tree_km"] == 0.011
    assert doc["display"]["actual_tree_km"] == 0.016
    assert doc["result"]["costs"]["optimized"] == 11
    assert doc["result"]["costs"]["actual"] == 16


def test_parse_round_trips_exactly(baseline, oracle_ds):
    text = render_report(baseline, oracle_ds.fingerprint)
    result, fp = parse_report(text)
    assert result == baseline
    assert fp == oracle_ds.fingerprint
    assert render_report(result, fp) == text


def test_matches_the_committed_golden_file(baseline, oracle_ds):
    assert render_report(baseline, oracle_ds.fingerprint) == GOLDEN.read_text(encoding="utf-8")


def test_no_wall_clock_fields_anywhere(baseline, oracle_ds):
    text = render_report(baseline, oracle_ds.fingerprint)
    assert "wall" not in text and "time" not in text


@pytest.mark.parametrize(
    "text",
    [
        "not json at all",
        "{}",
        '{"schema_version": "99", "dataset_fingerprint": "x", "result": {}}',
    ],
)
def test_malformed_documents_are_rejected(text):
    with pytest.raises(ReportError):
        parse_report(text)


# -- tables ---------------------------------------------------------------------


def test_flow_table(baseline):
    assert flows_csv(baseline) == (
        "village_id,trader_id,trees\nv1,t1,4\nv1,t2,1\nv2,t2,5\n"
    )


def test_permit_table(baseline):
    assert permits_csv(baseline) == (
        "trader_id,village_id,trees\nt1,v1,4\nt2,v1,1\nt2,v2,5\n"
    )


def test_priority_table(baseline):
    assert priorities_csv(baseline) == (
        "village_id,optimal_trees,actual_trees,delta,label\n"
        "v1,5,4,1,plant-priority\n"
        "v2,5,6,-1,satisfied\n"
    )


def test_curve_table_lists_every_curve(baseline):
    lines = curves_csv(baseline).splitlines()
    assert lines[0] == "curve,value,count_at_or_above,fraction"
    names = {line.split(",")[0] for line in lines[1:]}
    assert names == {"trader_demand", "trader_intake", "transaction_trees"}
    assert "trader_demand,4,2,1.0" in lines


def test_cluster_table_requires_a_clustered_run(baseline):
    with pytest.raises(ReportError):
        clusters_csv(baseline)


def test_write_report_files_covers_the_bundle(tmp_path, baseline, oracle_ds):
    written = write_report_files(tmp_path, baseline, oracle_ds.fingerprint)
    names = {p.name for p in written}
    assert names == {"report.json", "flows.csv", "permits.csv", "priorities.csv", "curves.csv"}
    assert (tmp_path / "report.json").read_text(encoding="utf-8") == GOLDEN.read_text(
        encoding="utf-8"
    )


def test_clustered_bundle_includes_the_class_table(tmp_path):
    params = SynthParams(
        villages=8, traders=6, farms=30, transactions=60, road_nodes=16, district_km=10.0
    )
    ds = load_dataset(generate_dataset(tmp_path / "ds", params, seed=2))
    result = run_scenario(build_instance(ds), ScenarioConfig(clustering=True))
    written = write_report_files(tmp_path / "out", result, ds.fingerprint)
    assert "clusters.csv" in {p.name for p in written}
    table = (tmp_path / "out" / "clusters.csv").read_text(encoding="utf-8")
    assert table.startswith("trader_id,cluster_label,original_demand,permit\n")
    assert len(table.splitlines()) == 7  # header + one row per trader


# -- figures --------------------------------------------------------------------


def test_figures_render_to_files(tmp_path, oracle_ds, baseline):
    written = write_figures(tmp_path, oracle_ds, baseline)
    assert {p.name for p in written} == {"survival.png", "flow_map.png", "priority_map.png"}
    for p in written:
        assert p.stat().st_size > 1000
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
