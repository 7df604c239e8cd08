"""Command-line entry points.

Data goes to stdout (or --out); everything human-facing goes to stderr.
Exit codes: 0 success, 1 for domain problems (infeasible floors, no road
data, and so on), 2 for malformed input files or arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cache
from .clustering import ClusteringError
from .dataset import Dataset, DatasetError, load_dataset, trader_sites, village_sites
from .market import MarketError, tree_km
from .network import FlowError, NetworkError
from .report import (
    ReportError,
    clusters_csv,
    flows_csv,
    parse_report,
    render_report,
    write_report_files,
)
from .roads import RoadFileError, od_cost_matrix
from .scenario import ScenarioConfig, ScenarioError, ScenarioResult, run_scenario
from .solver import SOLVER_NAMES, FloorInfeasibleError
from .synth import SynthError, SynthParams, generate_dataset

FORMAT_ERRORS = (DatasetError, RoadFileError, ReportError)
DOMAIN_ERRORS = (
    MarketError,
    ScenarioError,
    ClusteringError,
    SynthError,
    NetworkError,
    FlowError,
    FloorInfeasibleError,
)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of scenario settings; flags override it")
    p.add_argument("--supply-scale", type=float, default=None, dest="supply_scale")
    p.add_argument("--trader-floor", type=int, default=None, dest="trader_floor")
    p.add_argument(
        "--clustering",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="moderate permits through five demand classes",
    )
    p.add_argument(
        "--supply-mode", choices=("potential", "historical"), default=None, dest="supply_mode"
    )
    p.add_argument("--solver", choices=SOLVER_NAMES, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--high-volume-threshold", type=int, default=None, dest="high_volume_threshold"
    )


def _config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    merged: dict = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ScenarioError(f"{args.config}: config must be a JSON object")
        merged.update(raw)
    for name in (
        "supply_scale",
        "trader_floor",
        "clustering",
        "supply_mode",
        "solver",
        "seed",
        "high_volume_threshold",
    ):
        value = getattr(args, name)
        if value is not None:
            merged[name] = value
    return ScenarioConfig.from_dict(merged)


def _scenario_report(ds: Dataset, cfg: ScenarioConfig) -> tuple[str, ScenarioResult]:
    """Render (or fetch from cache) the canonical report for one run."""
    cached = cache.cached_report(ds.fingerprint, cfg)
    if cached is not None:
        result, _ = parse_report(cached)
        return cached, result
    result = run_scenario(ds, cfg)
    text = render_report(result, ds.fingerprint)
    cache.store_report(ds.fingerprint, cfg, text)
    return text, result


# -- subcommands ----------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    _emit(json.dumps(ds.summary(), indent=2, sort_keys=True) + "\n", args.out)
    _info(f"dataset ok: {len(ds.villages)} villages, {len(ds.traders)} traders")
    return 0


def _cmd_odmatrix(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    if ds.roads is not None:
        od = od_cost_matrix(village_sites(ds), trader_sites(ds), ds.roads)
    elif ds.od is not None:
        od = ds.od
    else:
        raise MarketError("dataset has neither road files nor a distance matrix")
    _emit(od.to_csv(), args.out)
    _info(f"{len(od.origins)} x {len(od.destinations)} distances")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    cfg = _config_from_args(args)
    _, result = _scenario_report(ds, cfg)
    _emit(flows_csv(result), args.out)
    _info(
        f"shipped {result.value} trees; optimized {tree_km(result.optimized_cost):.3f} "
        f"tree-km vs actual {tree_km(result.actual_cost):.3f}"
    )
    for w in result.warnings:
        _info(f"warning: {w}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    cfg = _config_from_args(args)
    if not cfg.clustering:
        cfg = ScenarioConfig.from_dict({**cfg.to_dict(), "clustering": True})
    _, result = _scenario_report(ds, cfg)
    _emit(clusters_csv(result), args.out)
    _info(f"{len(result.cluster.classes)} demand classes over {len(result.cluster.rows)} traders")
    return 0


def _cmd_scenario(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    cfg = _config_from_args(args)
    text, result = _scenario_report(ds, cfg)
    _emit(text, args.out)
    for w in result.warnings:
        _info(f"warning: {w}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    cfg = _config_from_args(args)
    _, result = _scenario_report(ds, cfg)
    written = write_report_files(args.out, result, ds.fingerprint)
    if args.figures:
        from .figures import write_figures  # matplotlib import stays off the fast path

        written += write_figures(args.out, ds, result)
    for path in written:
        _info(f"wrote {path}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    fields = ("villages", "traders", "farms", "transactions", "road_nodes", "district_km")
    overrides = {k: getattr(args, k) for k in fields if getattr(args, k) is not None}
    params = SynthParams(**overrides)
    root = generate_dataset(args.out_dir, params, seed=args.seed)
    ds = load_dataset(root)
    _emit(ds.fingerprint + "\n", None)
    _info(f"wrote synthetic dataset to {root}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timberflow",
        description="Timber market optimization over road networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name: str, func, help: str, dataset: bool = True, out: bool = True):
        p = sub.add_parser(name, help=help)
        if dataset:
            p.add_argument("dataset", help="dataset directory")
        if out:
            p.add_argument("--out", help="write output here instead of stdout")
        p.set_defaults(func=func)
        return p

    cmd("validate", _cmd_validate, "check a dataset and print its summary")
    cmd("odmatrix", _cmd_odmatrix, "village-trader distance matrix as CSV")
    _add_config_flags(cmd("optimize", _cmd_optimize, "optimized flow table as CSV"))
    _add_config_flags(cmd("cluster", _cmd_cluster, "demand classes and moderated permits as CSV"))
    _add_config_flags(cmd("scenario", _cmd_scenario, "full scenario report as canonical JSON"))

    rep = sub.add_parser("report", help="write the report bundle (tables and figures)")
    rep.add_argument("dataset", help="dataset directory")
    rep.add_argument("--out", required=True, help="output directory")
    rep.add_argument(
        "--figures", action=argparse.BooleanOptionalAction, default=True,
        help="also render figure images",
    )
    _add_config_flags(rep)
    rep.set_defaults(func=_cmd_report)

    syn = sub.add_parser("synth", help="generate a synthetic district dataset")
    syn.add_argument("out_dir", help="directory to create")
    syn.add_argument("--seed", type=int, default=0)
    for flag in ("--villages", "--traders", "--farms", "--transactions", "--road-nodes"):
        syn.add_argument(flag, type=int, default=None)
    syn.add_argument("--district-km", type=float, default=None)
    syn.set_defaults(func=_cmd_synth)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FORMAT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
