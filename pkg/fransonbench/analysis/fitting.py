# coding=utf-8
"""
条纹拟合

counts = B + A·cos(φ + φ0) 的 Poisson 加权线性最小二乘。
线性化参数 (B, c1, c2) 对应 B + c1·cos φ − c2·sin φ，
A = hypot(c1, c2)，φ0 = atan2(c2, c1)。
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from fransonbench.core.errors import FitError

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4


@dataclass
class FitResult:
    """拟合结果，covariance 按 (A, B, φ0) 排列"""

    amplitude: float
    offset: float
    phase0: float
    covariance: np.ndarray
    chi2: float
    dof: int

    @property
    def amplitude_sigma(self) -> float:
        return math.sqrt(max(self.covariance[0, 0], 0.0))

    @property
    def offset_sigma(self) -> float:
        return math.sqrt(max(self.covariance[1, 1], 0.0))

    @property
    def phase0_sigma(self) -> float:
        return math.sqrt(max(self.covariance[2, 2], 0.0))

    @property
    def maximum(self) -> float:
        """条纹最大值 B + A"""
        return self.offset + self.amplitude

    @property
    def maximum_variance(self) -> float:
        cov = self.covariance
        return float(cov[0, 0] + cov[1, 1] + 2.0 * cov[0, 1])

    def evaluate(self, phases: Sequence[float]) -> np.ndarray:
        return self.offset + self.amplitude * np.cos(np.asarray(phases, dtype=float) + self.phase0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "amplitude": self.amplitude,
            "amplitude_sigma": self.amplitude_sigma,
            "offset": self.offset,
            "offset_sigma": self.offset_sigma,
            "phase0": self.phase0,
            "phase0_sigma": self.phase0_sigma,
            "chi2": self.chi2,
            "dof": self.dof,
        }


def phase_coverage(phases: Sequence[float]) -> float:
    """相位点在圆周上覆盖的弧长 = 2π − 最大间隙"""
    wrapped = np.sort(np.mod(np.asarray(phases, dtype=float), 2.0 * math.pi))
    if wrapped.size < 2:
        return 0.0
    gaps = np.diff(np.append(wrapped, wrapped[0] + 2.0 * math.pi))
    return float(2.0 * math.pi - gaps.max())


def fit_fringe(phases: Any, counts: Optional[Sequence[float]] = None) -> FitResult:
    """
    Poisson 加权正弦拟合

    Args:
        phases: 相位 (rad)，或带 phases / coincidences 属性的 FringeScan
        counts: 各相位点计数，方差取 max(count, 1)

    Returns:
        FitResult，A ≥ 0（符号并入 φ0）

    Raises:
        FitError: 点数少于 4、相位覆盖不超过 π 或设计矩阵秩亏
    """
    if counts is None:
        phases, counts = phases.phases, phases.coincidences
    phi = np.asarray(phases, dtype=float)
    y = np.asarray(counts, dtype=float)
    if phi.shape != y.shape or phi.ndim != 1:
        raise FitError("相位与计数长度不一致")
    if phi.size < MIN_FIT_POINTS:
        raise FitError(f"至少需要 {MIN_FIT_POINTS} 个相位点，当前 {phi.size}")
    coverage = phase_coverage(phi)
    if coverage <= math.pi:
        raise FitError(f"相位覆盖 {coverage:.3f} rad 未超过 π")

    design = np.column_stack([np.ones_like(phi), np.cos(phi), -np.sin(phi)])
    weights = 1.0 / np.maximum(y, 1.0)
    sqrt_w = np.sqrt(weights)
    weighted_design = design * sqrt_w[:, None]

    if np.linalg.matrix_rank(weighted_design) < 3:
        raise FitError("设计矩阵秩亏（相位点不足以区分 cos 与 sin 分量）")

    beta, _, _, _ = np.linalg.lstsq(weighted_design, y * sqrt_w, rcond=None)
    param_cov = np.linalg.inv(weighted_design.T @ weighted_design)

    offset, c1, c2 = (float(v) for v in beta)
    amplitude = math.hypot(c1, c2)
    phase0 = math.atan2(c2, c1)

    # (B, c1, c2) → (A, B, φ0)
    if amplitude > 0:
        jacobian = np.array(
            [
                [0.0, c1 / amplitude, c2 / amplitude],
                [1.0, 0.0, 0.0],
                [0.0, -c2 / amplitude ** 2, c1 / amplitude ** 2],
            ]
        )
    else:
        jacobian = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    covariance = jacobian @ param_cov @ jacobian.T

    residuals = (y - design @ beta) * sqrt_w
    dof = int(phi.size - 3)
    chi2 = float(residuals @ residuals)
    logger.debug("条纹拟合: A=%.4g B=%.4g φ0=%.4g χ²/dof=%.3g", amplitude, offset, phase0, chi2 / max(dof, 1))

    return FitResult(
        amplitude=amplitude,
        offset=offset,
        phase0=phase0,
        covariance=covariance,
        chi2=chi2,
        dof=dof,
    )
