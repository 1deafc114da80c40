# coding=utf-8
"""
探测链模块

- detectors: 门控探测模拟
- histogram: TAC 直方图与时间窗
"""

from fransonbench.detection.detectors import (
    DETECTOR_KINDS,
    PROVENANCE_NAMES,
    DetectionRecords,
    DetectorSpec,
    PairArrival,
    accidental_dark_probability,
    combined_jitter_ps,
    double_pair_probability,
    gate_category_probabilities,
    simulate_gate_outcomes,
)
from fransonbench.detection.histogram import (
    DEFAULT_BIN_WIDTH_PS,
    DEFAULT_RANGE_PS,
    CoincidenceHistogram,
    MeasuredFloor,
    WindowSelection,
    accidental_window_fraction,
    build_histogram,
    check_window,
    effective_window_bounds,
    estimate_floor,
    window_counts,
)

__all__ = [
    "DETECTOR_KINDS",
    "PROVENANCE_NAMES",
    "DetectionRecords",
    "DetectorSpec",
    "PairArrival",
    "accidental_dark_probability",
    "combined_jitter_ps",
    "double_pair_probability",
    "gate_category_probabilities",
    "simulate_gate_outcomes",
    "DEFAULT_BIN_WIDTH_PS",
    "DEFAULT_RANGE_PS",
    "CoincidenceHistogram",
    "MeasuredFloor",
    "WindowSelection",
    "accidental_window_fraction",
    "build_histogram",
    "check_window",
    "effective_window_bounds",
    "estimate_floor",
    "window_counts",
]
