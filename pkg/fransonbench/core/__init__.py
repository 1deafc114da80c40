# coding=utf-8
"""
核心模块 - 配置管理、异常与 Franson 模型
"""

from fransonbench.core.config import FieldReader, load_yaml_with_lines
from fransonbench.core.errors import (
    ConfigError,
    DegenerateSignalError,
    DomainError,
    FitError,
    FransonError,
    OutOfRangeError,
    RegimeRefusal,
)
from fransonbench.core.franson import (
    DEFAULT_SEPARATION_FACTOR,
    MONITORED_SHARE,
    OUTPUT_PORTS,
    PEAK_CENTER,
    PEAK_LEFT,
    PEAK_RIGHT,
    InterferometerSpec,
    RegimeReport,
    SourceSpec,
    coherence_length,
    coherence_time,
    franson_outcome_probabilities,
    franson_peak_probabilities,
    franson_regime_check,
    pair_emission_probability,
)
from fransonbench.core.loader import load_config

__all__ = [
    # 配置
    "FieldReader",
    "load_yaml_with_lines",
    "load_config",
    # 异常
    "ConfigError",
    "DegenerateSignalError",
    "DomainError",
    "FitError",
    "FransonError",
    "OutOfRangeError",
    "RegimeRefusal",
    # Franson 模型
    "DEFAULT_SEPARATION_FACTOR",
    "MONITORED_SHARE",
    "OUTPUT_PORTS",
    "PEAK_CENTER",
    "PEAK_LEFT",
    "PEAK_RIGHT",
    "InterferometerSpec",
    "RegimeReport",
    "SourceSpec",
    "coherence_length",
    "coherence_time",
    "franson_outcome_probabilities",
    "franson_peak_probabilities",
    "franson_regime_check",
    "pair_emission_probability",
]
