# coding=utf-8
"""
仿真模块

- scenario: 场景定义与加载
- engine: Monte-Carlo 与闭式引擎
"""

from fransonbench.simulation.engine import (
    DEFAULT_CHUNK_GATES,
    ENGINE_ANALYTIC,
    ENGINE_MONTECARLO,
    ENGINES,
    AgreementReport,
    FringeScan,
    accidental_probability_per_gate,
    agreement_report,
    expected_window_counts,
    run_analytic,
    run_engine,
    run_scan,
)
from fransonbench.simulation.scenario import (
    SCHEMA_VERSION,
    DetectionSettings,
    ExpectedResults,
    RegimeSettings,
    ScenarioSpec,
    equally_spaced_phases,
    load_hole_array,
    load_scenario,
)

__all__ = [
    "DEFAULT_CHUNK_GATES",
    "ENGINE_ANALYTIC",
    "ENGINE_MONTECARLO",
    "ENGINES",
    "AgreementReport",
    "FringeScan",
    "accidental_probability_per_gate",
    "agreement_report",
    "expected_window_counts",
    "run_analytic",
    "run_engine",
    "run_scan",
    "SCHEMA_VERSION",
    "DetectionSettings",
    "ExpectedResults",
    "RegimeSettings",
    "ScenarioSpec",
    "equally_spaced_phases",
    "load_hole_array",
    "load_scenario",
]
