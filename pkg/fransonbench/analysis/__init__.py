# coding=utf-8
"""
分析模块 - 条纹拟合与净可见度
"""

from fransonbench.analysis.fitting import FitResult, fit_fringe, phase_coverage
from fransonbench.analysis.visibility import (
    BELL_VISIBILITY_THRESHOLD,
    FLOOR_ANALYTIC,
    FLOOR_MEASURED,
    FLOOR_SOURCES,
    TableRow,
    TransmittanceCheck,
    VisibilityResult,
    analyze_scan,
    build_table_row,
    measured_noise_floor,
    net_visibility,
    noise_floor,
    transmittance_check,
)

__all__ = [
    "FitResult",
    "fit_fringe",
    "phase_coverage",
    "BELL_VISIBILITY_THRESHOLD",
    "FLOOR_ANALYTIC",
    "FLOOR_MEASURED",
    "FLOOR_SOURCES",
    "TableRow",
    "TransmittanceCheck",
    "VisibilityResult",
    "analyze_scan",
    "build_table_row",
    "measured_noise_floor",
    "net_visibility",
    "noise_floor",
    "transmittance_check",
]
