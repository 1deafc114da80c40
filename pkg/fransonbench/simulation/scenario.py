# coding=utf-8
"""
场景模块

一个场景描述一次完整的 Franson 实验：光子对源、两路通道、两台干涉仪、
两个探测器、相位扫描点和每点门数。场景文件是 YAML，键名带单位。
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from fransonbench.core.config import FieldReader, load_yaml_with_lines
from fransonbench.core.errors import ConfigError, DomainError
from fransonbench.core.franson import (
    DEFAULT_ENERGY_TOLERANCE,
    DEFAULT_SEPARATION_FACTOR,
    InterferometerSpec,
    RegimeReport,
    SourceSpec,
    franson_regime_check,
    pair_emission_probability,
)
from fransonbench.detection.detectors import DETECTOR_KINDS, DetectorSpec
from fransonbench.detection.histogram import (
    DEFAULT_BIN_WIDTH_PS,
    DEFAULT_RANGE_PS,
    WindowSelection,
    accidental_window_fraction,
    effective_window_bounds,
)
from fransonbench.plasmonics.channel import CHANNEL_KINDS, ChannelSpec, channel_transmittance
from fransonbench.plasmonics.hole_array import HoleArraySpec, LinewidthModel, ResonanceSpec
from fransonbench.plasmonics.permittivity import PermittivityTable, load_permittivity_table, parse_complex
from fransonbench.plasmonics.waveguide import LrsppWaveguideSpec

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_PHASE_STEPS = 16


@dataclass(frozen=True)
class DetectionSettings:
    """TAC 分箱与时间窗设置"""

    bin_width_ps: float = DEFAULT_BIN_WIDTH_PS
    range_ps: Tuple[float, float] = DEFAULT_RANGE_PS
    window: WindowSelection = field(default_factory=WindowSelection)

    def __post_init__(self):
        # 校验箱宽整除范围
        effective_window_bounds(self.window, self.bin_width_ps, self.range_ps)
        low, high = self.window.bounds_ps
        if low < self.range_ps[0] or high > self.range_ps[1]:
            raise DomainError(f"时间窗 [{low:g}, {high:g}] ps 超出直方图范围 {self.range_ps!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bin_width_ps": self.bin_width_ps,
            "range_ps": list(self.range_ps),
            "window": {"center_ps": self.window.center_ps, "half_width_ps": self.window.half_width_ps},
        }


@dataclass(frozen=True)
class RegimeSettings:
    separation_factor: float = DEFAULT_SEPARATION_FACTOR
    alignment_tolerance_ps: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"separation_factor": self.separation_factor}
        if self.alignment_tolerance_ps is not None:
            data["alignment_tolerance_ps"] = self.alignment_tolerance_ps
        return data


@dataclass(frozen=True)
class ExpectedResults:
    """场景期望结果（汇总表判定用）"""

    reference_visibility: float
    sample_visibility: float
    transmittance: float
    visibility_tolerance: float = 0.03
    transmittance_sigma_level: float = 2.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "reference_visibility": self.reference_visibility,
            "sample_visibility": self.sample_visibility,
            "transmittance": self.transmittance,
            "visibility_tolerance": self.visibility_tolerance,
            "transmittance_sigma_level": self.transmittance_sigma_level,
        }


@dataclass(frozen=True)
class ScenarioSpec:
    """
    完整实验场景

    相位扫描点作用在信号干涉仪上：Φ = φ_k + 信号干涉仪相位 + 闲频干涉仪相位。
    """

    name: str
    source: SourceSpec
    channel_signal: ChannelSpec
    channel_idler: ChannelSpec
    itf_signal: InterferometerSpec
    itf_idler: InterferometerSpec
    detectors: Tuple[DetectorSpec, DetectorSpec]
    phase_points: Tuple[float, ...]
    gates_per_point: int
    seed: int = 0
    detection: DetectionSettings = field(default_factory=DetectionSettings)
    regime: RegimeSettings = field(default_factory=RegimeSettings)
    label: str = ""
    expected: Optional[ExpectedResults] = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if not self.phase_points:
            raise DomainError("phase_points 不能为空")
        if not isinstance(self.gates_per_point, int) or self.gates_per_point <= 0:
            raise DomainError(f"gates_per_point 必须为正整数，当前 {self.gates_per_point!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise DomainError(f"seed 必须为非负整数，当前 {self.seed!r}")
        pair_emission_probability(self.source.pair_probability_per_gate)

    # === 派生量 ===

    @property
    def combined_visibility(self) -> float:
        """两台干涉仪本征可见度之积"""
        return self.itf_signal.intrinsic_visibility * self.itf_idler.intrinsic_visibility

    @property
    def monitored_ports(self) -> Tuple[int, int]:
        """(信号监测端口, 闲频监测端口) 下标"""
        return self.itf_signal.port, self.itf_idler.port

    @property
    def imbalance_ps(self) -> Tuple[float, float]:
        return self.itf_signal.imbalance_time_s * 1e12, self.itf_idler.imbalance_time_s * 1e12

    @property
    def gate_width_ps(self) -> float:
        return self.detectors[1].gate_width_ps

    @property
    def window_fraction(self) -> float:
        """门内均匀偶然符合落入时间窗的比例"""
        return accidental_window_fraction(
            self.detection.window, self.gate_width_ps, self.detection.bin_width_ps, self.detection.range_ps
        )

    def phase_sum(self, phase_point: float) -> float:
        return phase_point + self.itf_signal.phase_rad + self.itf_idler.phase_rad

    def channel_transmittances(self) -> Tuple[float, float]:
        """两路通道在各自中心波长处的透过率"""
        return (
            channel_transmittance(self.channel_signal, self.source.signal_center_nm),
            channel_transmittance(self.channel_idler, self.source.idler_center_nm),
        )

    def regime_report(self) -> RegimeReport:
        tolerance = self.regime.alignment_tolerance_ps
        return franson_regime_check(
            self.source,
            self.itf_signal,
            self.itf_idler,
            separation_factor=self.regime.separation_factor,
            alignment_tolerance_s=None if tolerance is None else tolerance * 1e-12,
        )

    def protocol_warnings(self) -> List[str]:
        """实验流程只在一路通道插入样品（参考扫描两路都不插入）"""
        inserted = [ch.has_element for ch in (self.channel_signal, self.channel_idler)].count(True)
        if inserted <= 1:
            return []
        message = f"场景 {self.name} 两路通道都插入了元件（参考扫描会同时去掉两者）"
        logger.warning(message)
        return [message]

    # === 变换 ===

    def reference(self) -> "ScenarioSpec":
        """去掉插入元件的参考场景（保留 U 形台插损）"""
        return replace(
            self,
            name=f"{self.name}:reference",
            channel_signal=self.channel_signal.reference(),
            channel_idler=self.channel_idler.reference(),
        )

    def with_overrides(
        self,
        seed: Optional[int] = None,
        gates_per_point: Optional[int] = None,
        phase_steps: Optional[int] = None,
    ) -> "ScenarioSpec":
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if gates_per_point is not None:
            changes["gates_per_point"] = gates_per_point
        if phase_steps is not None:
            changes["phase_points"] = equally_spaced_phases(phase_steps)
        return replace(self, **changes) if changes else self

    # === 序列化 ===

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": self.schema_version,
            "name": self.name,
            "label": self.label,
            "seed": self.seed,
            "gates_per_point": self.gates_per_point,
            "phase_points_rad": list(self.phase_points),
            "source": self.source.to_dict(),
            "interferometers": {"signal": self.itf_signal.to_dict(), "idler": self.itf_idler.to_dict()},
            "channels": {"signal": self.channel_signal.to_dict(), "idler": self.channel_idler.to_dict()},
            "detectors": {"signal": self.detectors[0].to_dict(), "idler": self.detectors[1].to_dict()},
            "detection": self.detection.to_dict(),
            "regime": self.regime.to_dict(),
        }
        if self.expected is not None:
            data["expected"] = self.expected.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "ScenarioSpec":
        return parse_scenario(FieldReader(data), base_dir)

    @property
    def scenario_hash(self) -> str:
        """规范 JSON（键排序）的 sha256"""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def equally_spaced_phases(steps: int) -> Tuple[float, ...]:
    """[0, 2π) 内等间隔相位"""
    if steps <= 0:
        raise DomainError(f"相位点数必须为正，当前 {steps!r}")
    return tuple(2.0 * math.pi * k / steps for k in range(steps))


# === 解析 ===


def _build(reader: FieldReader, factory, *args, **kwargs):
    """调用构造函数，把不变量错误转为指向该配置段的 ConfigError"""
    try:
        return factory(*args, **kwargs)
    except DomainError as e:
        raise reader.error(str(e)) from e


def _parse_source(r: FieldReader) -> SourceSpec:
    return _build(
        r,
        SourceSpec,
        pump_wavelength_nm=r.number("pump_wavelength_nm"),
        pump_coherence_length_m=r.number("pump_coherence_length_m"),
        signal_center_nm=r.number("signal_center_nm"),
        signal_width_fwhm_nm=r.number("signal_width_fwhm_nm"),
        idler_center_nm=r.number("idler_center_nm"),
        idler_width_fwhm_nm=r.number("idler_width_fwhm_nm"),
        pair_probability_per_gate=r.number("pair_probability_per_gate"),
        energy_tolerance=r.number("energy_tolerance", DEFAULT_ENERGY_TOLERANCE),
    )


def _parse_interferometer(r: FieldReader) -> InterferometerSpec:
    return _build(
        r,
        InterferometerSpec,
        imbalance_length_m=r.number("imbalance_length_m"),
        phase_rad=r.number("phase_rad", 0.0),
        intrinsic_visibility=r.number("intrinsic_visibility", 1.0),
        monitored_output=r.string("monitored_output", "out1"),
    )


def _parse_permittivity(r: FieldReader, base_dir: Optional[Path]) -> PermittivityTable:
    if r.has("table_file"):
        table_path = Path(r.string("table_file"))
        if not table_path.is_absolute() and base_dir is not None:
            table_path = base_dir / table_path
        try:
            return load_permittivity_table(table_path)
        except FileNotFoundError as e:
            raise r.error(str(e), "table_file") from e

    if r.has("fixed"):
        value = r.raw("fixed")
        try:
            eps = parse_complex(value) if isinstance(value, str) else complex(value)
        except (TypeError, ValueError) as e:
            raise r.error(str(e), "fixed") from e
        return PermittivityTable.fixed(eps)

    if r.has("table"):
        rows = r.raw("table")
        if not isinstance(rows, list):
            raise r.error("应为 [波长, 're,im'] 列表", "table")
        try:
            wavelengths = tuple(float(row[0]) for row in rows)
            values = tuple(parse_complex(row[1]) for row in rows)
        except (TypeError, ValueError, IndexError) as e:
            raise r.error(f"表格式错误: {e}", "table") from e
        return _build(r, PermittivityTable, wavelengths, values, r.string("source", ""))

    raise r.error("需要 table_file / fixed / table 之一")


def _parse_hole_array(r: FieldReader, base_dir: Optional[Path]) -> HoleArraySpec:
    resonances = []
    for item in r.items("resonances"):
        order = item.number_list("order")
        if len(order) != 2 or any(not o.is_integer() for o in order):
            raise item.error("order 应为两个整数 [i, j]", "order")
        resonances.append(
            _build(
                item,
                ResonanceSpec,
                order=(int(order[0]), int(order[1])),
                q=item.number("q", 3.0),
                peak_transmittance=item.number("peak_transmittance", 0.0),
            )
        )

    lw = r.section("linewidth", required=False)
    linewidth = _build(
        lw,
        LinewidthModel,
        gamma_ref_nm=lw.number("gamma_ref_nm", 40.0),
        d_ref_nm=lw.number("d_ref_nm", 600.0),
        exponent=lw.number("exponent", 2.0),
    )

    return _build(
        r,
        HoleArraySpec,
        period_a_nm=r.number("period_a_nm"),
        hole_diameter_d_nm=r.number("hole_diameter_d_nm"),
        film_thickness_nm=r.number("film_thickness_nm"),
        substrate_index=r.number("substrate_index"),
        permittivity=_parse_permittivity(r.section("permittivity"), base_dir),
        substrate_thickness_mm=r.number("substrate_thickness_mm", 0.9),
        array_extent_um=r.number("array_extent_um", 200.0),
        beam_diameter_um=r.number("beam_diameter_um", 50.0),
        resonances=tuple(resonances),
        linewidth=linewidth,
        fabry_perot_depth=r.number("fabry_perot_depth", 0.0),
        direct_floor=r.number("direct_floor", 0.0),
    )


def _parse_lrspp(r: FieldReader) -> LrsppWaveguideSpec:
    return _build(
        r,
        LrsppWaveguideSpec,
        stripe_length_cm=r.number("stripe_length_cm"),
        stripe_width_um=r.number("stripe_width_um"),
        stripe_thickness_nm=r.number("stripe_thickness_nm"),
        cladding_index=r.number("cladding_index"),
        propagation_loss_db_per_cm=r.number("propagation_loss_db_per_cm"),
        coupling_loss_per_facet_db=r.number("coupling_loss_per_facet_db"),
    )


def _parse_channel(r: FieldReader, base_dir: Optional[Path]) -> ChannelSpec:
    kind = r.string("kind", "identity", choices=CHANNEL_KINDS)
    element = None
    if kind == "hole_array":
        element = _parse_hole_array(r.section("hole_array"), base_dir)
    elif kind == "lrspp":
        element = _parse_lrspp(r.section("lrspp"))
    return _build(
        r,
        ChannelSpec,
        kind=kind,
        base_insertion_loss_db=r.number("base_insertion_loss_db", 0.0),
        element=element,
        polarization_dependence_bound_db=r.number("polarization_dependence_bound_db", 0.0),
        polarization_angle_rad=r.number("polarization_angle_rad", 0.0),
        calibrated_transmittance=r.optional_number("calibrated_transmittance"),
    )


def _parse_detector(r: FieldReader) -> DetectorSpec:
    return _build(
        r,
        DetectorSpec,
        kind=r.string("kind", choices=DETECTOR_KINDS),
        efficiency=r.number("efficiency"),
        dark_count_probability_per_gate=r.number("dark_count_probability_per_gate", 0.0),
        gate_width_ns=r.number("gate_width_ns", 2.5),
        jitter_ps=r.number("jitter_ps", 0.0),
    )


def _parse_detection(r: FieldReader) -> DetectionSettings:
    range_ps = r.number_list("range_ps", list(DEFAULT_RANGE_PS))
    if len(range_ps) != 2:
        raise r.error("range_ps 应为 [low, high]", "range_ps")
    w = r.section("window", required=False)
    window = _build(
        w,
        WindowSelection,
        center_ps=w.number("center_ps", 0.0),
        half_width_ps=w.number("half_width_ps", 1000.0),
    )
    return _build(
        r,
        DetectionSettings,
        bin_width_ps=r.number("bin_width_ps", DEFAULT_BIN_WIDTH_PS),
        range_ps=(range_ps[0], range_ps[1]),
        window=window,
    )


def _parse_phase_points(r: FieldReader) -> Tuple[float, ...]:
    if r.has("phase_points_rad"):
        points = r.number_list("phase_points_rad")
        if not points:
            raise r.error("phase_points_rad 不能为空", "phase_points_rad")
        return tuple(points)
    steps = r.integer("phase_steps", DEFAULT_PHASE_STEPS)
    if steps <= 0:
        raise r.error("phase_steps 必须为正", "phase_steps")
    return equally_spaced_phases(steps)


def parse_scenario(r: FieldReader, base_dir: Optional[Path] = None) -> ScenarioSpec:
    """
    从字段读取器构建场景

    Raises:
        ConfigError: 字段缺失、类型错误或违反不变量（带路径和行号）
    """
    version = r.integer("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise r.error(f"不支持的 schema_version {version}，当前版本 {SCHEMA_VERSION}", "schema_version")

    interferometers = r.section("interferometers")
    channels = r.section("channels")
    detectors = r.section("detectors")

    expected = None
    if r.has("expected"):
        e = r.section("expected")
        expected = ExpectedResults(
            reference_visibility=e.number("reference_visibility"),
            sample_visibility=e.number("sample_visibility"),
            transmittance=e.number("transmittance"),
            visibility_tolerance=e.number("visibility_tolerance", 0.03),
            transmittance_sigma_level=e.number("transmittance_sigma_level", 2.0),
        )

    regime = r.section("regime", required=False)

    return _build(
        r,
        ScenarioSpec,
        name=r.string("name"),
        source=_parse_source(r.section("source")),
        channel_signal=_parse_channel(channels.section("signal"), base_dir),
        channel_idler=_parse_channel(channels.section("idler"), base_dir),
        itf_signal=_parse_interferometer(interferometers.section("signal")),
        itf_idler=_parse_interferometer(interferometers.section("idler")),
        detectors=(_parse_detector(detectors.section("signal")), _parse_detector(detectors.section("idler"))),
        phase_points=_parse_phase_points(r),
        gates_per_point=r.integer("gates_per_point"),
        seed=r.integer("seed", 0),
        detection=_parse_detection(r.section("detection", required=False)),
        regime=RegimeSettings(
            separation_factor=regime.number("separation_factor", DEFAULT_SEPARATION_FACTOR),
            alignment_tolerance_ps=regime.optional_number("alignment_tolerance_ps"),
        ),
        label=r.string("label", ""),
        expected=expected,
        schema_version=version,
    )


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    """
    加载场景文件（YAML 或场景 JSON 回显）

    相对路径（介电常数表）相对场景文件所在目录解析。

    Raises:
        FileNotFoundError: 文件不存在
        ConfigError: 解析或校验失败
    """
    scenario_path = Path(path)
    if scenario_path.suffix == ".json":
        if not scenario_path.exists():
            raise FileNotFoundError(f"场景文件 {scenario_path} 不存在")
        try:
            data = json.loads(scenario_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON 解析失败: {e.msg}", str(scenario_path), e.lineno) from e
        # 结果 JSON 中场景回显位于 scenario 字段
        if isinstance(data, dict) and "scenario" in data and "source" not in data:
            data = data["scenario"]
        return parse_scenario(FieldReader(data), scenario_path.parent)

    data, lines = load_yaml_with_lines(scenario_path)
    return parse_scenario(FieldReader(data, lines), scenario_path.parent)


def load_hole_array(path: Union[str, Path]) -> HoleArraySpec:
    """
    加载单独的孔阵列配置（spectrum 命令使用）

    文件可以直接是 hole_array 段，也可以包在 hole_array 键下。

    Raises:
        FileNotFoundError: 文件不存在
        ConfigError: 解析或校验失败
    """
    array_path = Path(path)
    data, lines = load_yaml_with_lines(array_path)
    reader = FieldReader(data, lines)
    if reader.has("hole_array"):
        reader = reader.section("hole_array")
    return _parse_hole_array(reader, array_path.parent)
