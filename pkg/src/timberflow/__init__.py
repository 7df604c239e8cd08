"""Timber market flow optimization toolkit.

Load a dataset directory, build a market instance over its road network,
and run what-if scenarios whose reports are byte-stable:

    from timberflow import load_dataset, build_instance, run_scenario, ScenarioConfig

    ds = load_dataset("district/")
    result = run_scenario(build_instance(ds), ScenarioConfig(supply_scale=0.75))
"""

from .clustering import ClusterModel, cluster_traders, moderate_demands
from .dataset import Dataset, DatasetError, load_dataset
from .market import (
    MarketError,
    MarketInstance,
    MarketSolution,
    build_instance,
    optimize_market,
)
from .report import parse_report, render_report, write_report_files
from .roads import ODMatrix, RoadGraph, load_road_network, od_cost_matrix
from .scenario import (
    ScenarioConfig,
    ScenarioError,
    ScenarioResult,
    SurvivalCurve,
    run_scenario,
    survival_function,
)
from .service import create_app
from .solver import FloorInfeasibleError, solve_market
from .synth import SynthParams, generate_dataset

__version__ = "0.1.0"

__all__ = [
    "ClusterModel",
    "Dataset",
    "DatasetError",
    "FloorInfeasibleError",
    "MarketError",
    "MarketInstance",
    "MarketSolution",
    "ODMatrix",
    "RoadGraph",
    "ScenarioConfig",
    "ScenarioError",
    "ScenarioResult",
    "SurvivalCurve",
    "SynthParams",
    "build_instance",
    "cluster_traders",
    "create_app",
    "generate_dataset",
    "load_dataset",
    "load_road_network",
    "moderate_demands",
    "od_cost_matrix",
    "optimize_market",
    "parse_report",
    "render_report",
    "run_scenario",
    "solve_market",
    "survival_function",
    "write_report_files",
    "__version__",
]
