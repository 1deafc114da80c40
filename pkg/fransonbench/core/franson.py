# coding=utf-8
"""
Franson 模型模块

光子对源参数、非平衡干涉仪参数，以及闭式的 Franson 符合概率：
- coherence_time / coherence_length: 单光子相干时间与相干长度
- franson_outcome_probabilities: 一对光子的完整出射分布（时间类 × 端口）
- franson_peak_probabilities: 监测端口上的三峰概率
- pair_emission_probability: μ 换算为每门产生光子对的概率
- franson_regime_check: Franson 干涉成立条件检查
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from fransonbench.core.errors import DomainError

# 时间类下标：左峰（信号走长臂）、中心峰（SS/LL）、右峰（闲频走长臂）
PEAK_LEFT, PEAK_CENTER, PEAK_RIGHT = 0, 1, 2

# 干涉仪输出端口名，下标即 franson_outcome_probabilities 的端口下标
OUTPUT_PORTS = ("out1", "out2")

# 相位平均下任一端口组合分得的光子对比例
MONITORED_SHARE = 0.25

# 能量守恒默认相对容差（相位匹配可调）
DEFAULT_ENERGY_TOLERANCE = 1e-2

# “远大于”判据的默认倍数
DEFAULT_SEPARATION_FACTOR = 10.0


def _require_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} 必须为正数，当前值 {value!r}")


def _require_visibility(value: float, name: str = "v0") -> None:
    if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
        raise DomainError(f"{name} 必须在 [0, 1] 内，当前值 {value!r}")


@dataclass(frozen=True)
class SourceSpec:
    """
    连续泵浦 SPDC 光子对源

    波长单位 nm，泵浦相干长度单位 m。
    pair_probability_per_gate 即 μ：相位平均后每个门落在监测端口组合上的光子对概率。
    每门实际产生光子对的概率为 μ / MONITORED_SHARE。
    """

    pump_wavelength_nm: float
    pump_coherence_length_m: float
    signal_center_nm: float
    signal_width_fwhm_nm: float
    idler_center_nm: float
    idler_width_fwhm_nm: float
    pair_probability_per_gate: float
    energy_tolerance: float = DEFAULT_ENERGY_TOLERANCE

    def __post_init__(self):
        for name in (
            "pump_wavelength_nm",
            "pump_coherence_length_m",
            "signal_center_nm",
            "signal_width_fwhm_nm",
            "idler_center_nm",
            "idler_width_fwhm_nm",
            "energy_tolerance",
        ):
            _require_positive(name, getattr(self, name))

        mu = self.pair_probability_per_gate
        if not (isinstance(mu, (int, float)) and 0.0 <= mu < 1.0):
            raise DomainError(f"pair_probability_per_gate 必须在 [0, 1) 内，当前值 {mu!r}")

        mismatch = self.energy_mismatch
        if mismatch > self.energy_tolerance:
            raise DomainError(
                f"能量不守恒: 1/λs + 1/λi 与 1/λp 相对偏差 {mismatch:.3e} "
                f"超过容差 {self.energy_tolerance:.1e}"
            )

    @property
    def energy_mismatch(self) -> float:
        """1/λs + 1/λi 相对 1/λp 的偏差"""
        pair_sum = 1.0 / self.signal_center_nm + 1.0 / self.idler_center_nm
        return abs(pair_sum * self.pump_wavelength_nm - 1.0)

    @property
    def signal_coherence_time_s(self) -> float:
        return coherence_time(self.signal_center_nm, self.signal_width_fwhm_nm)

    @property
    def idler_coherence_time_s(self) -> float:
        return coherence_time(self.idler_center_nm, self.idler_width_fwhm_nm)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class InterferometerSpec:
    """非平衡 Mach-Zehnder 干涉仪"""

    imbalance_length_m: float
    phase_rad: float = 0.0
    intrinsic_visibility: float = 1.0
    monitored_output: str = "out1"

    def __post_init__(self):
        _require_positive("imbalance_length_m", self.imbalance_length_m)
        if self.monitored_output not in OUTPUT_PORTS:
            raise DomainError(f"monitored_output 必须是 {', '.join(OUTPUT_PORTS)} 之一，当前 {self.monitored_output!r}")
        _require_visibility(self.intrinsic_visibility, "intrinsic_visibility")
        if not math.isfinite(self.phase_rad):
            raise DomainError(f"phase_rad 必须为有限值，当前值 {self.phase_rad!r}")

    @property
    def port(self) -> int:
        """监测端口下标"""
        return OUTPUT_PORTS.index(self.monitored_output)

    @property
    def imbalance_time_s(self) -> float:
        """长短臂时间差"""
        return self.imbalance_length_m / SPEED_OF_LIGHT

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def coherence_time(center_nm: float, width_fwhm_nm: float) -> float:
    """
    单光子相干时间 τc = λ² / (c·Δλ)

    Args:
        center_nm: 中心波长 (nm)
        width_fwhm_nm: 光谱半高宽 (nm)

    Returns:
        相干时间 (s)

    Raises:
        DomainError: 输入非正
    """
    _require_positive("center", center_nm)
    _require_positive("width_fwhm", width_fwhm_nm)
    center_m = center_nm * 1e-9
    width_m = width_fwhm_nm * 1e-9
    return center_m * center_m / (SPEED_OF_LIGHT * width_m)


def coherence_length(center_nm: float, width_fwhm_nm: float) -> float:
    """相干长度 (m) = c × τc"""
    return SPEED_OF_LIGHT * coherence_time(center_nm, width_fwhm_nm)


def franson_outcome_probabilities(phase_sum: float, v0: float) -> np.ndarray:
    """
    一对光子进入两台干涉仪后的完整出射分布

    分束器为理想 50/50。中心时间类（SS 与 LL 不可区分）的端口关联为
    同端口 (1 + V·cosΦ)/8、异端口 (1 − V·cosΦ)/8；两侧时间类每种端口组合均为 1/16。

    Args:
        phase_sum: 两台干涉仪相位之和 Φ (rad)
        v0: 本征可见度 ∈ [0, 1]

    Returns:
        形状 (3, 2, 2) 的概率数组，下标为 [时间类, 信号端口, 闲频端口]，总和为 1
    """
    _require_visibility(v0)
    fringe = v0 * math.cos(phase_sum)
    probs = np.full((3, 2, 2), 1.0 / 16.0)
    same = (1.0 + fringe) / 8.0
    crossed = (1.0 - fringe) / 8.0
    probs[PEAK_CENTER] = [[same, crossed], [crossed, same]]
    return probs


def pair_emission_probability(pair_probability: float) -> float:
    """
    每门产生光子对的概率 μ / MONITORED_SHARE

    Raises:
        DomainError: 结果超过 1（μ > 1/4）
    """
    emission = pair_probability / MONITORED_SHARE
    if emission > 1.0:
        raise DomainError(
            f"pair_probability_per_gate={pair_probability!r} 对应每门产生 {emission:.3f} 对光子，"
            f"μ 不能超过 {MONITORED_SHARE}"
        )
    return emission


def franson_peak_probabilities(phase_sum: float, v0: float) -> Tuple[float, float, float]:
    """
    两光子都从监测端口出射时三个时间峰的概率

    Returns:
        (p_left, p_center, p_right)，其中 p_left = p_right = 1/16，
        p_center = (1 + v0·cos(phase_sum)) / 8
    """
    _require_visibility(v0)
    p_center = (1.0 + v0 * math.cos(phase_sum)) / 8.0
    return 1.0 / 16.0, p_center, 1.0 / 16.0


@dataclass
class RegimeReport:
    """Franson 条件检查报告，三项全部通过才可预测干涉"""

    pump_coherence_ok: bool
    separation_ok: bool
    imbalance_match_ok: bool
    pump_coherence_margin: float
    separation_margin: float
    imbalance_offset_s: float
    alignment_tolerance_s: float
    separation_factor: float

    @property
    def passed(self) -> bool:
        return self.pump_coherence_ok and self.separation_ok and self.imbalance_match_ok

    def failed_flags(self) -> List[str]:
        flags = []
        if not self.pump_coherence_ok:
            flags.append("a:pump_coherence")
        if not self.separation_ok:
            flags.append("b:peak_separation")
        if not self.imbalance_match_ok:
            flags.append("c:imbalance_match")
        return flags

    def format_lines(self) -> List[str]:
        """人类可读的逐项结果"""

        def mark(ok: bool) -> str:
            return "✅" if ok else "❌"

        return [
            f"{mark(self.pump_coherence_ok)} (a) 泵浦相干长度 ≫ 不平衡量: "
            f"裕度 {self.pump_coherence_margin:.3g} (需 > 1)",
            f"{mark(self.separation_ok)} (b) 不平衡时间 ≫ 单光子相干时间: "
            f"裕度 {self.separation_margin:.3g} (需 > 1)",
            f"{mark(self.imbalance_match_ok)} (c) 两台干涉仪不平衡匹配: "
            f"偏差 {self.imbalance_offset_s * 1e12:.4g} ps, "
            f"容差 {self.alignment_tolerance_s * 1e12:.4g} ps",
        ]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def franson_regime_check(
    source: SourceSpec,
    itf_a: InterferometerSpec,
    itf_b: InterferometerSpec,
    separation_factor: float = DEFAULT_SEPARATION_FACTOR,
    alignment_tolerance_s: Optional[float] = None,
) -> RegimeReport:
    """
    检查 Franson 干涉成立的三个条件

    (a) 泵浦相干长度 > separation_factor × 最大不平衡长度
    (b) 最小不平衡时间 > separation_factor × 最大单光子相干时间
    (c) 两台干涉仪不平衡时间之差 ≤ alignment_tolerance_s

    Args:
        source: 光子对源
        itf_a: 信号光干涉仪
        itf_b: 闲频光干涉仪
        separation_factor: “远大于”的倍数
        alignment_tolerance_s: 匹配容差 (s)，None 时取两光子相干时间中的较大者

    Returns:
        RegimeReport，不抛异常
    """
    tau_max = max(source.signal_coherence_time_s, source.idler_coherence_time_s)
    if alignment_tolerance_s is None:
        alignment_tolerance_s = tau_max

    longest_imbalance = max(itf_a.imbalance_length_m, itf_b.imbalance_length_m)
    pump_margin = source.pump_coherence_length_m / (separation_factor * longest_imbalance)

    shortest_delay = min(itf_a.imbalance_time_s, itf_b.imbalance_time_s)
    separation_margin = shortest_delay / (separation_factor * tau_max)

    offset = abs(itf_a.imbalance_time_s - itf_b.imbalance_time_s)

    return RegimeReport(
        pump_coherence_ok=pump_margin > 1.0,
        separation_ok=separation_margin > 1.0,
        imbalance_match_ok=offset <= alignment_tolerance_s,
        pump_coherence_margin=pump_margin,
        separation_margin=separation_margin,
        imbalance_offset_s=offset,
        alignment_tolerance_s=alignment_tolerance_s,
        separation_factor=separation_factor,
    )
