# coding=utf-8
"""
配置加载模块

负责从 YAML 配置文件和环境变量加载应用配置。
场景文件（实验参数）由 simulation.scenario 单独加载。
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from fransonbench.core.errors import ConfigError
from fransonbench.utils.time import DEFAULT_TIMEZONE, resolve_timezone


def _get_env_bool(key: str) -> Optional[bool]:
    """从环境变量获取布尔值，如果未设置返回 None"""
    value = os.environ.get(key, "").strip().lower()
    if not value:
        return None
    return value in ("true", "1")


def _get_env_int(key: str, default: int = 0) -> int:
    """从环境变量获取整数值"""
    value = os.environ.get(key, "").strip()
    if not value:
        return default
    try:
        return int(value)
    except ValueError:
        return default


def _get_env_str(key: str, default: str = "") -> str:
    """从环境变量获取字符串值"""
    return os.environ.get(key, "").strip() or default


def _load_app_config(config_data: Dict) -> Dict:
    """加载应用配置"""
    app_config = config_data.get("app", {}) or {}
    timezone = _get_env_str("FRANSON_TIMEZONE") or app_config.get("timezone", DEFAULT_TIMEZONE)
    resolve_timezone(timezone)
    return {
        "TIMEZONE": timezone,
        "LOG_LEVEL": (_get_env_str("FRANSON_LOG_LEVEL") or app_config.get("log_level", "WARNING")).upper(),
    }


def _load_output_config(config_data: Dict) -> Dict:
    """加载输出配置"""
    output = config_data.get("output", {}) or {}
    date_folder_env = _get_env_bool("FRANSON_USE_DATE_FOLDER")
    return {
        "DATA_DIR": _get_env_str("FRANSON_OUTPUT_DIR") or output.get("data_dir", "output"),
        "USE_DATE_FOLDER": date_folder_env if date_folder_env is not None else output.get("use_date_folder", True),
    }


def _load_simulation_config(config_data: Dict) -> Dict:
    """加载仿真配置"""
    simulation = config_data.get("simulation", {}) or {}
    return {
        "WORKERS": _get_env_int("FRANSON_WORKERS") or simulation.get("workers", 1),
        "CHUNK_GATES": _get_env_int("FRANSON_CHUNK_GATES") or simulation.get("chunk_gates", 250_000),
    }


def _load_plasmonics_config(config_data: Dict) -> Dict:
    """加载等离激元求解配置"""
    plasmonics = config_data.get("plasmonics", {}) or {}
    return {
        "DAMPING": plasmonics.get("damping", 0.5),
        "TOLERANCE_NM": plasmonics.get("tolerance_nm", 1e-3),
        "MAX_ITERATIONS": plasmonics.get("max_iterations", 100),
        "SPECTRUM_STEP_NM": plasmonics.get("spectrum_step_nm", 0.05),
    }


def _load_analysis_config(config_data: Dict) -> Dict:
    """加载分析配置"""
    analysis = config_data.get("analysis", {}) or {}
    return {
        "NOISE_FLOOR_SOURCE": _get_env_str("FRANSON_NOISE_FLOOR") or analysis.get("noise_floor_source", "analytic"),
        "AGREEMENT_Z": analysis.get("agreement_z", 5.0),
    }


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    加载配置文件

    Args:
        config_path: 配置文件路径，默认从环境变量 CONFIG_PATH 获取或使用 config/config.yaml

    Returns:
        包含所有配置的字典

    Raises:
        FileNotFoundError: 配置文件不存在
        ConfigError: YAML 语法错误
    """
    if config_path is None:
        config_path = os.environ.get("CONFIG_PATH", "config/config.yaml")

    if not Path(config_path).exists():
        raise FileNotFoundError(f"配置文件 {config_path} 不存在")

    with open(config_path, "r", encoding="utf-8") as f:
        try:
            config_data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ConfigError(f"YAML 解析失败: {e}", str(config_path), line) from e

    # 合并所有配置
    config: Dict[str, Any] = {}
    config.update(_load_app_config(config_data))
    config.update(_load_output_config(config_data))
    config.update(_load_simulation_config(config_data))
    config["PLASMONICS"] = _load_plasmonics_config(config_data)
    config.update(_load_analysis_config(config_data))
    config["CONFIG_PATH"] = str(config_path)

    return config
