# coding=utf-8
"""
净可见度分析

- noise_floor: 闭式噪声底（暗计数 + 双光子对）
- measured_noise_floor: 直方图平坦区估计的噪声底
- net_visibility: V = A / (B − N)，一阶误差传播
- transmittance_check: 样品 / 参考的条纹最大值 (B + A) 之比
- TableRow: 参考与样品扫描合成的一行汇总
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from fransonbench.analysis.fitting import FitResult, fit_fringe
from fransonbench.core.errors import DegenerateSignalError, DomainError
from fransonbench.detection.detectors import combined_jitter_ps
from fransonbench.detection.histogram import estimate_floor
from fransonbench.simulation.engine import FringeScan, accidental_probability_per_gate, peak_offsets_ps
from fransonbench.simulation.scenario import ExpectedResults, ScenarioSpec

logger = logging.getLogger(__name__)

FLOOR_ANALYTIC = "analytic"
FLOOR_MEASURED = "measured"
FLOOR_SOURCES = (FLOOR_ANALYTIC, FLOOR_MEASURED)

# 平坦区离各时间峰的最小距离：max(300 ps, 4σ 抖动)
MIN_FLOOR_GUARD_PS = 300.0
FLOOR_GUARD_JITTER_SIGMAS = 4.0

# 能量-时间纠缠 Bell 型判据对应的可见度下限（仅作参考输出）
BELL_VISIBILITY_THRESHOLD = 1.0 / math.sqrt(2.0)


def noise_floor(s: ScenarioSpec) -> float:
    """
    每个相位点窗内偶然符合期望

    gates_per_point × (p_dark + p_double) × 窗/门重叠比例
    """
    return s.gates_per_point * accidental_probability_per_gate(s) * s.window_fraction


def measured_noise_floor(scan: FringeScan, s: ScenarioSpec) -> Tuple[float, float, List[str]]:
    """
    从合并直方图的平坦区估计每点噪声底

    Returns:
        (每点噪声底, Poisson 不确定度, 警告记录)

    Raises:
        DomainError: 扫描没有直方图（analytic 引擎）
    """
    if scan.histogram is None:
        raise DomainError("measured 噪声底需要 Monte-Carlo 扫描的直方图")
    guard = max(MIN_FLOOR_GUARD_PS, FLOOR_GUARD_JITTER_SIGMAS * combined_jitter_ps(s.detectors))
    floor = estimate_floor(scan.histogram, s.detection.window, s.gate_width_ps, peak_offsets_ps(s), guard)
    points = scan.n_points
    return floor.value / points, floor.sigma / points, floor.warnings


@dataclass
class VisibilityResult:
    raw_amplitude: float
    offset: float
    fitted_phase0: float
    noise_floor: float
    net_visibility: float
    net_visibility_sigma: float
    noise_floor_sigma: float = 0.0
    clipped: bool = False
    transmittance_ratio: Optional[float] = None
    fit: Optional[FitResult] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def raw_visibility(self) -> float:
        return self.raw_amplitude / self.offset if self.offset > 0 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "raw_amplitude": self.raw_amplitude,
            "offset": self.offset,
            "fitted_phase0": self.fitted_phase0,
            "noise_floor": self.noise_floor,
            "noise_floor_sigma": self.noise_floor_sigma,
            "raw_visibility": self.raw_visibility,
            "net_visibility": self.net_visibility,
            "net_visibility_sigma": self.net_visibility_sigma,
            "clipped": self.clipped,
            "transmittance_ratio": self.transmittance_ratio,
            "warnings": list(self.warnings),
        }
        if self.fit is not None:
            data["fit"] = self.fit.to_dict()
        return data


def net_visibility(fit: FitResult, noise_floor: float, noise_floor_sigma: float = 0.0) -> VisibilityResult:
    """
    扣除噪声底后的净可见度 V = A / (B − N)

    Args:
        fit: 条纹拟合结果
        noise_floor: 每点噪声底 N
        noise_floor_sigma: N 的不确定度（闭式噪声底取 √N，平坦区估计取其 Poisson 误差）

    Returns:
        VisibilityResult，V > 1 时截断为 1 并标记 clipped

    Raises:
        DegenerateSignalError: B ≤ N
    """
    signal = fit.offset - noise_floor
    if signal <= 0:
        raise DegenerateSignalError(
            f"偏置 B={fit.offset:.4g} 不高于噪声底 N={noise_floor:.4g}，无法计算净可见度"
        )

    value = fit.amplitude / signal
    gradient = np.array([1.0 / signal, -fit.amplitude / signal ** 2])
    variance = float(gradient @ fit.covariance[:2, :2] @ gradient)
    variance += (fit.amplitude / signal ** 2) ** 2 * noise_floor_sigma ** 2
    sigma = math.sqrt(max(variance, 0.0))

    warnings = []
    clipped = value > 1.0
    if clipped:
        message = f"净可见度 {value:.4f} > 1（统计涨落），已截断为 1"
        logger.warning(message)
        warnings.append(message)
        value = 1.0

    return VisibilityResult(
        raw_amplitude=fit.amplitude,
        offset=fit.offset,
        fitted_phase0=fit.phase0,
        noise_floor=noise_floor,
        noise_floor_sigma=noise_floor_sigma,
        net_visibility=value,
        net_visibility_sigma=sigma,
        clipped=clipped,
        fit=fit,
        warnings=warnings,
    )


def analyze_scan(scan: FringeScan, s: ScenarioSpec, floor_source: str = FLOOR_ANALYTIC) -> VisibilityResult:
    """拟合扫描并计算净可见度"""
    if floor_source not in FLOOR_SOURCES:
        raise DomainError(f"未知噪声底来源 {floor_source!r}，可选 {', '.join(FLOOR_SOURCES)}")
    fit = fit_fringe(scan)
    if floor_source == FLOOR_MEASURED:
        floor, floor_sigma, warnings = measured_noise_floor(scan, s)
    else:
        floor = noise_floor(s)
        floor_sigma, warnings = math.sqrt(floor), []
    result = net_visibility(fit, floor, floor_sigma)
    result.warnings = warnings + result.warnings
    return result


@dataclass
class TransmittanceCheck:
    ratio: float
    sigma: float
    expected: Optional[float] = None
    sigma_level: float = 2.0

    @property
    def compatible(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return abs(self.ratio - self.expected) <= self.sigma_level * self.sigma

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratio": self.ratio,
            "sigma": self.sigma,
            "expected": self.expected,
            "sigma_level": self.sigma_level,
            "compatible": self.compatible,
        }


def transmittance_check(
    scan_ref: FringeScan,
    scan_sample: FringeScan,
    expected: Optional[float] = None,
    sigma_level: float = 2.0,
) -> TransmittanceCheck:
    """
    样品扫描与参考扫描拟合条纹最大值 (B + A) 之比

    噪声底不扣除：双光子对偶然符合随通道透过率同比缩放，暗计数偶然符合不随之缩放，
    场景的暗计数率需要远低于光子对计数率，比值才接近通道透过率。

    Args:
        scan_ref: 参考扫描（无样品）
        scan_sample: 样品扫描
        expected: 通道标定透过率，给出时做 sigma_level 倍 σ 的兼容性判定
        sigma_level: 兼容性判定的 σ 倍数

    Raises:
        DomainError: 两次扫描相位网格或门数不同
        DegenerateSignalError: 参考扫描条纹最大值不为正
    """
    if not (
        np.array_equal(scan_ref.phases, scan_sample.phases) and np.array_equal(scan_ref.gates, scan_sample.gates)
    ):
        raise DomainError("参考与样品扫描的相位网格或门数不一致")

    fit_ref = fit_fringe(scan_ref)
    fit_sample = fit_fringe(scan_sample)

    max_ref = fit_ref.maximum
    max_sample = fit_sample.maximum
    if max_ref <= 0:
        raise DegenerateSignalError("参考扫描的条纹最大值不为正")

    ratio = max_sample / max_ref
    relative = fit_ref.maximum_variance / max_ref ** 2
    if max_sample > 0:
        relative += fit_sample.maximum_variance / max_sample ** 2
        sigma = abs(ratio) * math.sqrt(relative)
    else:
        sigma = math.sqrt(fit_sample.maximum_variance) / max_ref
    return TransmittanceCheck(ratio=ratio, sigma=sigma, expected=expected, sigma_level=sigma_level)


@dataclass
class TableRow:
    """一行汇总：参考可见度、样品可见度、透过率"""

    label: str
    engine: str
    reference: VisibilityResult
    sample: VisibilityResult
    transmittance: TransmittanceCheck
    expected: Optional[ExpectedResults] = None

    @property
    def visibility_difference(self) -> float:
        return self.sample.net_visibility - self.reference.net_visibility

    @property
    def visibility_difference_sigma(self) -> float:
        return math.hypot(self.sample.net_visibility_sigma, self.reference.net_visibility_sigma)

    def _tolerance(self, sigma: float) -> float:
        """场景给出的固定容差；没有期望值时退回 2σ"""
        if self.expected is not None:
            return self.expected.visibility_tolerance
        return 2.0 * sigma

    @property
    def visibility_preserved(self) -> bool:
        """样品与参考净可见度在容差内一致"""
        return abs(self.visibility_difference) <= self._tolerance(self.visibility_difference_sigma)

    @property
    def reference_matches(self) -> Optional[bool]:
        if self.expected is None:
            return None
        deviation = abs(self.reference.net_visibility - self.expected.reference_visibility)
        return deviation <= self._tolerance(self.reference.net_visibility_sigma)

    @property
    def sample_matches(self) -> Optional[bool]:
        if self.expected is None:
            return None
        deviation = abs(self.sample.net_visibility - self.expected.sample_visibility)
        return deviation <= self._tolerance(self.sample.net_visibility_sigma)

    @property
    def clipped(self) -> bool:
        """任一净可见度被截断到 1"""
        return self.reference.clipped or self.sample.clipped

    @property
    def passed(self) -> bool:
        verdicts = [self.visibility_preserved, self.reference_matches, self.sample_matches, self.transmittance.compatible]
        return all(v is not False for v in verdicts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "engine": self.engine,
            "reference_visibility": self.reference.net_visibility,
            "reference_visibility_sigma": self.reference.net_visibility_sigma,
            "sample_visibility": self.sample.net_visibility,
            "sample_visibility_sigma": self.sample.net_visibility_sigma,
            "transmittance": self.transmittance.to_dict(),
            "visibility_preserved": self.visibility_preserved,
            "reference_matches": self.reference_matches,
            "sample_matches": self.sample_matches,
            "passed": self.passed,
            "clipped": self.clipped,
            "above_bell_threshold": self.sample.net_visibility > BELL_VISIBILITY_THRESHOLD,
            "expected": self.expected.to_dict() if self.expected is not None else None,
            "reference": self.reference.to_dict(),
            "sample": self.sample.to_dict(),
        }


def build_table_row(
    s: ScenarioSpec,
    scan_ref: FringeScan,
    scan_sample: FringeScan,
    floor_source: str = FLOOR_ANALYTIC,
) -> TableRow:
    """参考 / 样品扫描 → 汇总行"""
    reference = analyze_scan(scan_ref, s.reference(), floor_source)
    sample = analyze_scan(scan_sample, s, floor_source)
    expected_t = s.expected.transmittance if s.expected is not None else None
    sigma_level = s.expected.transmittance_sigma_level if s.expected is not None else 2.0
    check = transmittance_check(
        scan_ref,
        scan_sample,
        expected=expected_t,
        sigma_level=sigma_level,
    )
    sample.transmittance_ratio = check.ratio
    return TableRow(
        label=s.label or s.name,
        engine=scan_sample.engine,
        reference=reference,
        sample=sample,
        transmittance=check,
        expected=s.expected,
    )
