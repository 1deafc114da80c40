# coding=utf-8
"""
光通道模块

通道 = U 形台基础插损 × 插入元件透过率 × 偏振相关因子。
元件可以是空（identity）、金孔阵列或 LR-SPP 波导。
"""

import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Sequence, Union

from fransonbench.core.errors import DomainError, OutOfRangeError
from fransonbench.plasmonics.hole_array import HoleArraySpec, transmittance_at
from fransonbench.plasmonics.waveguide import LrsppWaveguideSpec, db_to_ratio

CHANNEL_KINDS = ("identity", "hole_array", "lrspp")

Element = Union[HoleArraySpec, LrsppWaveguideSpec, None]


def ratio_to_db(transmittance: float) -> float:
    """透过率 → 损耗 dB，T=0 时为 inf"""
    if transmittance <= 0:
        return math.inf
    return -10.0 * math.log10(transmittance)


@dataclass(frozen=True)
class ChannelSpec:
    """
    有损光通道

    Args:
        kind: identity / hole_array / lrspp
        base_insertion_loss_db: U 形台自身插损
        element: 插入元件，identity 时为 None
        polarization_dependence_bound_db: 偏振相关损耗峰峰值上限
        polarization_angle_rad: 默认偏振角
        calibrated_transmittance: 孔阵列在工作波长处的标定透过率（覆盖谱模型）
    """

    kind: str = "identity"
    base_insertion_loss_db: float = 0.0
    element: Element = None
    polarization_dependence_bound_db: float = 0.0
    polarization_angle_rad: float = 0.0
    calibrated_transmittance: Optional[float] = None

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise DomainError(f"未知通道类型 {self.kind!r}，可选 {', '.join(CHANNEL_KINDS)}")
        expected = {"identity": type(None), "hole_array": HoleArraySpec, "lrspp": LrsppWaveguideSpec}[self.kind]
        if not isinstance(self.element, expected):
            raise DomainError(f"{self.kind} 通道的元件类型不匹配: {type(self.element).__name__}")
        if self.base_insertion_loss_db < 0 or self.polarization_dependence_bound_db < 0:
            raise DomainError("插损与偏振相关损耗上限不能为负")
        if self.calibrated_transmittance is not None:
            if self.kind != "hole_array":
                raise DomainError("calibrated_transmittance 只适用于 hole_array 通道")
            if not 0.0 <= self.calibrated_transmittance <= 1.0:
                raise DomainError("calibrated_transmittance 必须在 [0, 1] 内")

    @property
    def has_element(self) -> bool:
        return self.kind != "identity"

    def reference(self) -> "ChannelSpec":
        """移除插入元件后的空 U 形台（保留基础插损）"""
        return replace(
            self,
            kind="identity",
            element=None,
            polarization_dependence_bound_db=0.0,
            calibrated_transmittance=None,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "kind": self.kind,
            "base_insertion_loss_db": self.base_insertion_loss_db,
            "polarization_dependence_bound_db": self.polarization_dependence_bound_db,
            "polarization_angle_rad": self.polarization_angle_rad,
        }
        if self.element is not None:
            data[self.kind] = self.element.to_dict()
        if self.calibrated_transmittance is not None:
            data["calibrated_transmittance"] = self.calibrated_transmittance
        return data


def element_transmittance(channel: ChannelSpec, wavelength_nm: float) -> float:
    """插入元件本身的透过率"""
    if channel.kind == "identity":
        return 1.0
    if channel.kind == "lrspp":
        return channel.element.transmittance
    if channel.calibrated_transmittance is not None:
        low, high = channel.element.permittivity.range_nm
        if not low <= wavelength_nm <= high:
            raise OutOfRangeError(f"波长 {wavelength_nm:g} nm 超出介电常数表范围 [{low:g}, {high:g}] nm")
        return channel.calibrated_transmittance
    return transmittance_at(channel.element, wavelength_nm)


def polarization_loss_db(bound_db: float, angle_rad: float) -> float:
    """偏振相关损耗 (B/2)(1 − cos 2θ)，峰峰值为 B"""
    return 0.5 * bound_db * (1.0 - math.cos(2.0 * angle_rad))


def channel_loss_db(
    channel: ChannelSpec, wavelength_nm: float, polarization_angle: Optional[float] = None
) -> float:
    """通道总损耗 (dB)"""
    return ratio_to_db(channel_transmittance(channel, wavelength_nm, polarization_angle))


def channel_transmittance(
    channel: ChannelSpec, wavelength_nm: float, polarization_angle: Optional[float] = None
) -> float:
    """
    通道在波长 λ、偏振角 θ 下的透过率

    Args:
        channel: 通道
        wavelength_nm: 波长
        polarization_angle: 偏振角 (rad)，None 时使用通道默认值

    Returns:
        T ∈ [0, 1]

    Raises:
        OutOfRangeError: λ 超出孔阵列介电常数表
    """
    if wavelength_nm <= 0:
        raise DomainError(f"波长必须为正，当前 {wavelength_nm!r}")
    angle = channel.polarization_angle_rad if polarization_angle is None else polarization_angle
    loss_db = channel.base_insertion_loss_db + polarization_loss_db(
        channel.polarization_dependence_bound_db, angle
    )
    value = db_to_ratio(loss_db) * element_transmittance(channel, wavelength_nm)
    return min(max(value, 0.0), 1.0)


def cascade_transmittance(
    channels: Sequence[ChannelSpec], wavelength_nm: float, polarization_angle: Optional[float] = None
) -> float:
    """级联通道透过率（dB 相加）"""
    total = 1.0
    for channel in channels:
        total *= channel_transmittance(channel, wavelength_nm, polarization_angle)
    return total
