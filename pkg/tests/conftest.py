# coding=utf-8
"""
测试公共夹具

小场景直接用字典构建，门数压到秒级；仓库自带场景只做解析和校验。
"""

import copy
import math
from pathlib import Path
from typing import Any, Dict

import pytest

from fransonbench.core.config import FieldReader
from fransonbench.simulation.scenario import ScenarioSpec, parse_scenario

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "config"
SCENARIO_DIR = CONFIG_DIR / "scenarios"
ARRAY_DIR = CONFIG_DIR / "arrays"
BUNDLED_SCENARIOS = ("eot_810", "eot_1550", "lrspp_1550")

# 1550 nm 处金的介电常数（无色散近似）
GOLD_1550 = "-115,11.6"

SMALL_SCENARIO: Dict[str, Any] = {
    "schema_version": 1,
    "name": "small",
    "label": "small test scenario",
    "seed": 7,
    "gates_per_point": 200000,
    "phase_steps": 8,
    "source": {
        "pump_wavelength_nm": 532.0,
        "pump_coherence_length_m": 1000.0,
        "signal_center_nm": 810.0,
        "signal_width_fwhm_nm": 2.0,
        "idler_center_nm": 1550.0,
        "idler_width_fwhm_nm": 7.0,
        "pair_probability_per_gate": 0.2,
    },
    "interferometers": {
        "signal": {"imbalance_length_m": 1.0, "intrinsic_visibility": 0.93},
        "idler": {"imbalance_length_m": 1.0, "intrinsic_visibility": 1.0},
    },
    "channels": {
        "signal": {"kind": "identity", "base_insertion_loss_db": 3.0},
        "idler": {"kind": "identity", "base_insertion_loss_db": 3.0},
    },
    "detectors": {
        "signal": {"kind": "free_running", "efficiency": 0.8, "jitter_ps": 100.0},
        "idler": {
            "kind": "gated",
            "efficiency": 0.25,
            "dark_count_probability_per_gate": 3.5e-5,
            "gate_width_ns": 2.5,
            "jitter_ps": 150.0,
        },
    },
    "detection": {
        "bin_width_ps": 100.0,
        "range_ps": [-5000.0, 5000.0],
        "window": {"center_ps": 0.0, "half_width_ps": 1000.0},
    },
    "regime": {"separation_factor": 10.0},
}


def build_scenario(data: Dict[str, Any]) -> ScenarioSpec:
    """字典 → 场景（相对路径相对 config/scenarios 解析）"""
    return parse_scenario(FieldReader(data), SCENARIO_DIR)


def lossy_idler(data: Dict[str, Any], transmittance: float) -> Dict[str, Any]:
    """在闲频通道上叠加一段透过率为 transmittance 的插损"""
    result = copy.deepcopy(data)
    result["channels"]["idler"]["base_insertion_loss_db"] += -10.0 * math.log10(transmittance)
    return result


@pytest.fixture
def small_data() -> Dict[str, Any]:
    return copy.deepcopy(SMALL_SCENARIO)


@pytest.fixture
def small_scenario(small_data) -> ScenarioSpec:
    return build_scenario(small_data)


@pytest.fixture
def config_path() -> Path:
    return CONFIG_DIR / "config.yaml"


@pytest.fixture(params=BUNDLED_SCENARIOS)
def bundled_scenario_path(request) -> Path:
    return SCENARIO_DIR / f"{request.param}.yaml"
