# coding=utf-8
"""
亚波长金孔阵列模块

- sp_resonance_wavelengths: 方格阵列动量匹配条件下的 SP 共振波长（色散时不动点迭代）
- transmittance_spectrum: Fano 线型叠加 + 玻璃衬底 Fabry-Perot 调制的透射谱
- fabry_perot_period / sp_propagation_length: 诊断量
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fransonbench.core.errors import DomainError, OutOfRangeError
from fransonbench.plasmonics.permittivity import PermittivityTable

logger = logging.getLogger(__name__)

# 不动点迭代默认参数
DEFAULT_DAMPING = 0.5
DEFAULT_TOLERANCE_NM = 1e-3
DEFAULT_MAX_ITERATIONS = 100

# Fabry-Perot 调制深度上限
MAX_FABRY_PEROT_DEPTH = 0.2

# 光束面积 / 阵列面积 上限（无限阵列近似）
MAX_BEAM_FILL_RATIO = 0.1

Order = Tuple[int, int]


@dataclass(frozen=True)
class LinewidthModel:
    """
    线宽随孔径的单调映射 Γ(d) = gamma_ref_nm × (d / d_ref_nm) ** exponent
    """

    gamma_ref_nm: float = 40.0
    d_ref_nm: float = 600.0
    exponent: float = 2.0

    def __post_init__(self):
        if self.gamma_ref_nm <= 0 or self.d_ref_nm <= 0:
            raise DomainError("linewidth: gamma_ref_nm 与 d_ref_nm 必须为正")
        if self.exponent <= 0:
            raise DomainError(f"linewidth: exponent 必须为正（Γ 随孔径单调增加），当前 {self.exponent!r}")

    def gamma(self, hole_diameter_nm: float) -> float:
        return self.gamma_ref_nm * (hole_diameter_nm / self.d_ref_nm) ** self.exponent

    def to_dict(self) -> Dict[str, Any]:
        return {"gamma_ref_nm": self.gamma_ref_nm, "d_ref_nm": self.d_ref_nm, "exponent": self.exponent}


@dataclass(frozen=True)
class ResonanceSpec:
    """单个共振阶次的 Fano 配置（峰值透过率是标定输入）"""

    order: Order
    q: float = 3.0
    peak_transmittance: float = 0.0

    def __post_init__(self):
        if tuple(self.order) == (0, 0):
            raise DomainError("共振阶次不能为 (0, 0)")
        if not 0.0 <= self.peak_transmittance <= 1.0:
            raise DomainError(f"peak_transmittance 必须在 [0, 1] 内，当前 {self.peak_transmittance!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {"order": list(self.order), "q": self.q, "peak_transmittance": self.peak_transmittance}


@dataclass(frozen=True)
class FanoParams:
    """已解出的 Fano 线型参数"""

    center_nm: float
    q: float
    gamma_nm: float
    peak_transmittance: float

    def __post_init__(self):
        if self.gamma_nm <= 0:
            raise DomainError(f"Fano 线宽必须为正，当前 {self.gamma_nm!r}")

    def evaluate(self, wavelengths_nm: np.ndarray) -> np.ndarray:
        """归一化 Fano 线型，最大值等于 peak_transmittance"""
        eps = 2.0 * (np.asarray(wavelengths_nm, dtype=float) - self.center_nm) / self.gamma_nm
        shape = (self.q + eps) ** 2 / ((1.0 + eps ** 2) * (1.0 + self.q ** 2))
        return self.peak_transmittance * shape


@dataclass(frozen=True)
class HoleArraySpec:
    """
    穿孔金膜样品

    几何单位: 周期/孔径/膜厚 nm，衬底厚度 mm，阵列边长与光束直径 μm。
    resonances / linewidth / fabry_perot_depth / direct_floor 描述透射谱模型。
    """

    period_a_nm: float
    hole_diameter_d_nm: float
    film_thickness_nm: float
    substrate_index: float
    permittivity: PermittivityTable
    substrate_thickness_mm: float = 0.9
    array_extent_um: float = 200.0
    beam_diameter_um: float = 50.0
    resonances: Tuple[ResonanceSpec, ...] = ()
    linewidth: LinewidthModel = field(default_factory=LinewidthModel)
    fabry_perot_depth: float = 0.0
    direct_floor: float = 0.0

    def __post_init__(self):
        if not 0 < self.hole_diameter_d_nm < self.period_a_nm:
            raise DomainError(
                f"孔径 d={self.hole_diameter_d_nm} nm 必须为正且小于周期 a={self.period_a_nm} nm"
            )
        if self.film_thickness_nm <= 0:
            raise DomainError("film_thickness_nm 必须为正")
        if self.substrate_index <= 1:
            raise DomainError(f"substrate_index 必须大于 1，当前 {self.substrate_index!r}")
        if self.substrate_thickness_mm <= 0 or self.array_extent_um <= 0 or self.beam_diameter_um <= 0:
            raise DomainError("衬底厚度、阵列尺寸与光束直径必须为正")
        if self.beam_fill_ratio > MAX_BEAM_FILL_RATIO:
            raise DomainError(
                f"光束面积占阵列面积 {self.beam_fill_ratio:.1%}，超过 {MAX_BEAM_FILL_RATIO:.0%}，无限阵列近似不成立"
            )
        if not 0.0 <= self.fabry_perot_depth <= MAX_FABRY_PEROT_DEPTH:
            raise DomainError(f"fabry_perot_depth 必须在 [0, {MAX_FABRY_PEROT_DEPTH}] 内")
        if not 0.0 <= self.direct_floor < 1.0:
            raise DomainError("direct_floor 必须在 [0, 1) 内")

    @property
    def substrate_permittivity(self) -> float:
        return self.substrate_index ** 2

    @property
    def beam_fill_ratio(self) -> float:
        beam_area = math.pi * (self.beam_diameter_um / 2.0) ** 2
        return beam_area / self.array_extent_um ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "period_a_nm": self.period_a_nm,
            "hole_diameter_d_nm": self.hole_diameter_d_nm,
            "film_thickness_nm": self.film_thickness_nm,
            "substrate_index": self.substrate_index,
            "permittivity": self.permittivity.to_dict(),
            "substrate_thickness_mm": self.substrate_thickness_mm,
            "array_extent_um": self.array_extent_um,
            "beam_diameter_um": self.beam_diameter_um,
            "resonances": [r.to_dict() for r in self.resonances],
            "linewidth": self.linewidth.to_dict(),
            "fabry_perot_depth": self.fabry_perot_depth,
            "direct_floor": self.direct_floor,
        }


def _effective_index(eps_metal: complex, eps_dielectric: float) -> float:
    """Re √(ε_m ε_d / (ε_m + ε_d))"""
    return cmath.sqrt(eps_metal * eps_dielectric / (eps_metal + eps_dielectric)).real


def solve_resonance(
    array: HoleArraySpec,
    order: Order,
    damping: float = DEFAULT_DAMPING,
    tolerance_nm: float = DEFAULT_TOLERANCE_NM,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """
    求解单个阶次 (i, j) 的共振波长

    λ(i,j) = a / √(i² + j²) × Re √(ε_m(λ) ε_d / (ε_m(λ) + ε_d))

    无色散表直接取闭式；有色散表做阻尼不动点迭代。

    Raises:
        DomainError: 阶次为 (0, 0)
        OutOfRangeError: 迭代离开表范围或不收敛
    """
    i, j = int(order[0]), int(order[1])
    if i == 0 and j == 0:
        raise DomainError("共振阶次不能为 (0, 0)")

    radius = math.hypot(i, j)
    eps_d = array.substrate_permittivity
    table = array.permittivity

    if table.is_dispersionless:
        return array.period_a_nm * (_effective_index(table.values[0], eps_d) / radius)

    wavelength = array.period_a_nm * array.substrate_index / radius
    for _ in range(max_iterations):
        if not table.contains(wavelength):
            raise OutOfRangeError(
                f"阶次 ({i},{j}) 在介电常数表范围内无不动点 (迭代至 {wavelength:.1f} nm)"
            )
        target = array.period_a_nm * (_effective_index(table(wavelength), eps_d) / radius)
        updated = (1.0 - damping) * wavelength + damping * target
        if abs(updated - wavelength) < tolerance_nm:
            if not table.contains(updated):
                break
            return updated
        wavelength = updated

    raise OutOfRangeError(f"阶次 ({i},{j}) 在 {max_iterations} 次迭代内未收敛到表范围内的不动点")


def sp_resonance_wavelengths(
    array: HoleArraySpec,
    orders: Iterable[Order],
    damping: float = DEFAULT_DAMPING,
    tolerance_nm: float = DEFAULT_TOLERANCE_NM,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> List[float]:
    """
    多个阶次的共振波长，降序排列

    (1,1) 阶对应沿方格对角线传播的金属-衬底界面 SP 模式。
    """
    wavelengths = [
        solve_resonance(array, order, damping, tolerance_nm, max_iterations) for order in orders
    ]
    return sorted(wavelengths, reverse=True)


def fano_params_for_array(
    array: HoleArraySpec,
    resonances: Optional[Sequence[ResonanceSpec]] = None,
    **solver_options: Any,
) -> List[FanoParams]:
    """按阵列几何解出每个共振的中心与线宽"""
    gamma = array.linewidth.gamma(array.hole_diameter_d_nm)
    params = []
    for resonance in array.resonances if resonances is None else resonances:
        center = solve_resonance(array, resonance.order, **solver_options)
        params.append(FanoParams(center, resonance.q, gamma, resonance.peak_transmittance))
    return params


def fabry_perot_period(wavelength_nm: float, substrate_index: float, substrate_thickness_mm: float) -> float:
    """衬底 Fabry-Perot 振荡周期 Δλ = λ² / (2 n L)，单位 nm"""
    thickness_nm = substrate_thickness_mm * 1e6
    return wavelength_nm ** 2 / (2.0 * substrate_index * thickness_nm)


def sp_propagation_length(array: HoleArraySpec, wavelength_nm: float) -> float:
    """金属-衬底界面 SP 的强度传播长度 1 / (2 Im k_sp)，单位 μm"""
    eps_m = array.permittivity(wavelength_nm)
    eps_d = array.substrate_permittivity
    k_sp = (2.0 * math.pi / wavelength_nm) * cmath.sqrt(eps_m * eps_d / (eps_m + eps_d))
    return 1.0 / (2.0 * k_sp.imag) * 1e-3


@dataclass
class Spectrum:
    """透射谱结果"""

    wavelengths_nm: np.ndarray
    transmittance: np.ndarray
    resonances_nm: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def as_pairs(self) -> List[Tuple[float, float]]:
        return list(zip(self.wavelengths_nm.tolist(), self.transmittance.tolist()))


def _envelope(
    array: HoleArraySpec, wavelengths: np.ndarray, fano_params: Sequence[FanoParams]
) -> np.ndarray:
    total = np.full(wavelengths.shape, float(array.direct_floor))
    for params in fano_params:
        total += params.evaluate(wavelengths)
    return total


def _fabry_perot_factor(array: HoleArraySpec, wavelengths: np.ndarray) -> np.ndarray:
    optical_path_nm = array.substrate_index * array.substrate_thickness_mm * 1e6
    return 1.0 + array.fabry_perot_depth * np.cos(4.0 * math.pi * optical_path_nm / wavelengths)


def transmittance_spectrum(
    array: HoleArraySpec,
    wavelengths_nm: Sequence[float],
    fano_params: Optional[Sequence[FanoParams]] = None,
    include_fabry_perot: bool = True,
) -> Spectrum:
    """
    生成透射谱 T(λ) = [direct_floor + Σ Fano_k(λ)] × [1 + m·cos(4π n L / λ)]

    Args:
        array: 孔阵列
        wavelengths_nm: 升序波长网格
        fano_params: 每个共振的 Fano 参数，None 时由 array.resonances 解出
        include_fabry_perot: 是否叠加衬底 Fabry-Perot 调制

    Returns:
        Spectrum，T 超出 [0, 1] 时截断并附带警告记录

    Raises:
        DomainError: 波长网格非升序
        OutOfRangeError: 共振求解失败
    """
    grid = np.asarray(wavelengths_nm, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("波长网格必须是非空一维序列")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("波长网格必须严格升序")
    if np.any(grid <= 0):
        raise DomainError("波长必须为正")

    if fano_params is None:
        fano_params = fano_params_for_array(array)

    values = _envelope(array, grid, fano_params)
    if include_fabry_perot and array.fabry_perot_depth > 0:
        values = values * _fabry_perot_factor(array, grid)

    warnings = []
    outside = (values > 1.0) | (values < 0.0)
    if np.any(outside):
        message = (
            f"{int(outside.sum())} 个波长点 T 超出 [0, 1] "
            f"(范围 {values.min():.4f} ~ {values.max():.4f})，已截断"
        )
        logger.warning(message)
        warnings.append(message)
    values = np.clip(values, 0.0, 1.0)

    return Spectrum(
        wavelengths_nm=grid,
        transmittance=values,
        resonances_nm=sorted((p.center_nm for p in fano_params), reverse=True),
        warnings=warnings,
    )


def transmittance_at(array: HoleArraySpec, wavelength_nm: float, include_fabry_perot: bool = False) -> float:
    """单个波长处的透过率（默认取不含 Fabry-Perot 纹波的包络）"""
    if not array.permittivity.contains(wavelength_nm):
        low, high = array.permittivity.range_nm
        raise OutOfRangeError(f"波长 {wavelength_nm:g} nm 超出介电常数表范围 [{low:g}, {high:g}] nm")
    spectrum = transmittance_spectrum(array, [wavelength_nm], include_fabry_perot=include_fabry_perot)
    return float(spectrum.transmittance[0])
