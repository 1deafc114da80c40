# coding=utf-8
"""
仿真引擎

- run_scan: Monte-Carlo 相位扫描（joblib 并行，分块计数器播种）
- run_analytic: 闭式期望值扫描，作为 Monte-Carlo 的对照
- agreement_report: 两个引擎逐点比较

播种约定：第 k 个相位点的第 c 个分块使用
SeedSequence(seed, spawn_key=(k, c))，结果与 worker 数无关。
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm

from fransonbench.core.errors import DomainError, RegimeRefusal
from fransonbench.core.franson import franson_outcome_probabilities, pair_emission_probability
from fransonbench.detection.detectors import (
    PROVENANCE_NAMES,
    DetectionRecords,
    DetectorSpec,
    PairArrival,
    accidental_dark_probability,
    combined_jitter_ps,
    double_pair_probability,
    simulate_gate_outcomes,
)
from fransonbench.detection.histogram import (
    CoincidenceHistogram,
    build_histogram,
    check_window,
    effective_window_bounds,
    window_counts,
)
from fransonbench.simulation.scenario import DetectionSettings, ScenarioSpec

logger = logging.getLogger(__name__)

ENGINE_ANALYTIC = "analytic"
ENGINE_MONTECARLO = "montecarlo"
ENGINES = (ENGINE_ANALYTIC, ENGINE_MONTECARLO)

DEFAULT_CHUNK_GATES = 250_000
DEFAULT_AGREEMENT_Z = 5.0


@dataclass
class FringeScan:
    """
    相位扫描结果

    coincidences 为窗内符合计数（analytic 引擎为期望值，非整数）。
    """

    engine: str
    scenario_name: str
    scenario_hash: str
    seed: int
    phases: np.ndarray
    coincidences: np.ndarray
    gates: np.ndarray
    noise_floor: float = 0.0
    histogram: Optional[CoincidenceHistogram] = None
    point_histograms: List[CoincidenceHistogram] = field(default_factory=list)
    records: Optional[DetectionRecords] = None
    provenance_counts: Dict[str, int] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        self.coincidences = np.asarray(self.coincidences)
        self.gates = np.asarray(self.gates, dtype=np.int64)
        if not (self.phases.shape == self.coincidences.shape == self.gates.shape):
            raise DomainError("扫描结果各列长度不一致")
        if np.any(self.coincidences < 0):
            raise DomainError("符合计数不能为负")

    @property
    def n_points(self) -> int:
        return int(self.phases.size)

    @property
    def gates_per_point(self) -> int:
        return int(self.gates[0]) if self.gates.size else 0

    def to_rows(self) -> List[Tuple[float, Any, int]]:
        """CSV 行：phase_rad, coincidences, gates"""
        rows = []
        for phase, count, gates in zip(self.phases, self.coincidences, self.gates):
            value = int(count) if self.engine == ENGINE_MONTECARLO else float(count)
            rows.append((float(phase), value, int(gates)))
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "engine": self.engine,
            "scenario_name": self.scenario_name,
            "scenario_hash": self.scenario_hash,
            "seed": self.seed,
            "phases_rad": self.phases.tolist(),
            "coincidences": [row[1] for row in self.to_rows()],
            "gates": self.gates.tolist(),
            "noise_floor": self.noise_floor,
            "provenance_counts": dict(self.provenance_counts),
            "warnings": list(self.warnings),
        }


# === 期望值 ===


def detection_probabilities(s: ScenarioSpec) -> Tuple[float, float]:
    """(T_s·η_s, T_i·η_i)"""
    t_signal, t_idler = s.channel_transmittances()
    return t_signal * s.detectors[0].efficiency, t_idler * s.detectors[1].efficiency


def accidental_probability_per_gate(s: ScenarioSpec) -> float:
    """每门偶然符合概率（暗计数 + 双光子对），门内均匀分布"""
    p_signal, p_idler = detection_probabilities(s)
    mu = s.source.pair_probability_per_gate
    return accidental_dark_probability(s.detectors) + double_pair_probability(mu, p_signal, p_idler)


def peak_offsets_ps(s: ScenarioSpec) -> Tuple[float, float, float]:
    """三个时间峰的位置 (−Δt_s, 0, +Δt_i)"""
    signal_ps, idler_ps = s.imbalance_ps
    return -signal_ps, 0.0, idler_ps


def peak_capture_fractions(s: ScenarioSpec) -> np.ndarray:
    """每个时间峰落入（分箱后）时间窗的比例"""
    low, high = effective_window_bounds(s.detection.window, s.detection.bin_width_ps, s.detection.range_ps)
    offsets = np.asarray(peak_offsets_ps(s))
    jitter = combined_jitter_ps(s.detectors)
    if jitter > 0:
        return norm.cdf((high - offsets) / jitter) - norm.cdf((low - offsets) / jitter)
    return ((offsets >= low) & (offsets < high)).astype(float)


def expected_window_counts(s: ScenarioSpec, phase_point: float) -> Tuple[float, float]:
    """
    单个相位点的窗内期望计数

    光子对项 = 门数 × T_s·T_i·η_s·η_i·μ·p(时间类) / MONITORED_SHARE × 各时间峰落窗比例，
    偶然符合项 = 门数 × (p_dark + p_double) × 窗/门重叠比例。

    Returns:
        (光子对项, 偶然符合项)
    """
    p_signal, p_idler = detection_probabilities(s)
    mu = s.source.pair_probability_per_gate
    signal_port, idler_port = s.monitored_ports
    outcomes = franson_outcome_probabilities(s.phase_sum(phase_point), s.combined_visibility)
    monitored = outcomes[:, signal_port, idler_port]
    emission = pair_emission_probability(mu)
    pair_term = emission * p_signal * p_idler * float(np.dot(monitored, peak_capture_fractions(s)))
    floor_term = accidental_probability_per_gate(s) * s.window_fraction
    return s.gates_per_point * pair_term, s.gates_per_point * floor_term


def _regime_gate(s: ScenarioSpec) -> List[str]:
    """检查 Franson 条件并收集警告，条件不满足时拒绝运行"""
    report = s.regime_report()
    if not report.passed:
        raise RegimeRefusal(report)
    return check_window(s.detection.window, s.imbalance_ps) + s.protocol_warnings()


def run_analytic(s: ScenarioSpec) -> FringeScan:
    """
    闭式期望值扫描

    Raises:
        RegimeRefusal: Franson 条件不满足
    """
    warnings = _regime_gate(s)
    expected = [expected_window_counts(s, phase) for phase in s.phase_points]
    return FringeScan(
        engine=ENGINE_ANALYTIC,
        scenario_name=s.name,
        scenario_hash=s.scenario_hash,
        seed=s.seed,
        phases=np.asarray(s.phase_points),
        coincidences=np.asarray([pair + floor for pair, floor in expected]),
        gates=np.full(len(s.phase_points), s.gates_per_point),
        noise_floor=expected[0][1],
        warnings=warnings,
    )


# === Monte-Carlo ===


def chunk_sizes(total_gates: int, chunk_gates: int) -> List[int]:
    """把一个相位点的门数切成固定大小的分块（最后一块可以更小）"""
    if chunk_gates <= 0:
        raise DomainError(f"chunk_gates 必须为正，当前 {chunk_gates!r}")
    full, rest = divmod(total_gates, chunk_gates)
    return [chunk_gates] * full + ([rest] if rest else [])


def chunk_rng(seed: int, point_index: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point_index, chunk_index)))


def _simulate_chunk(
    pair: PairArrival,
    detectors: Tuple[DetectorSpec, DetectorSpec],
    channels: Tuple[float, float],
    detection: DetectionSettings,
    seed: int,
    point_index: int,
    chunk_index: int,
    n_gates: int,
    first_gate_index: int,
    keep_records: bool,
) -> Tuple[CoincidenceHistogram, Dict[str, int], Optional[DetectionRecords]]:
    rng = chunk_rng(seed, point_index, chunk_index)
    records = simulate_gate_outcomes(pair, detectors, channels, rng, n_gates, first_gate_index)
    histogram = build_histogram(records, detection.bin_width_ps, detection.range_ps)
    return histogram, records.provenance_counts(), records if keep_records else None


def run_scan(
    s: ScenarioSpec,
    workers: int = 1,
    chunk_gates: int = DEFAULT_CHUNK_GATES,
    keep_records: bool = False,
) -> FringeScan:
    """
    Monte-Carlo 相位扫描

    Args:
        s: 场景
        workers: joblib 并行 worker 数（不影响结果）
        chunk_gates: 每个随机数分块的门数（属于播种约定，改变它会改变结果）
        keep_records: 是否保留逐门探测记录（导出 time-tag 用）

    Returns:
        FringeScan，附带每点直方图和合并直方图

    Raises:
        RegimeRefusal: Franson 条件不满足
    """
    warnings = _regime_gate(s)
    channels = s.channel_transmittances()
    signal_ps, idler_ps = s.imbalance_ps
    sizes = chunk_sizes(s.gates_per_point, chunk_gates)

    tasks = []
    for point_index, phase in enumerate(s.phase_points):
        pair = PairArrival.from_interferometers(
            s.source.pair_probability_per_gate,
            s.phase_sum(phase),
            s.combined_visibility,
            signal_ps,
            idler_ps,
            ports=s.monitored_ports,
        )
        first = point_index * s.gates_per_point
        for chunk_index, n_gates in enumerate(sizes):
            tasks.append(
                delayed(_simulate_chunk)(
                    pair,
                    s.detectors,
                    channels,
                    s.detection,
                    s.seed,
                    point_index,
                    chunk_index,
                    n_gates,
                    first + chunk_index * chunk_gates,
                    keep_records,
                )
            )

    logger.debug("场景 %s: %d 个分块, %d 个 worker", s.name, len(tasks), workers)
    results = Parallel(n_jobs=workers)(tasks)

    point_histograms = []
    coincidences = []
    all_records = []
    provenance = Counter()
    per_point = len(sizes)
    for point_index in range(len(s.phase_points)):
        chunk_results = results[point_index * per_point:(point_index + 1) * per_point]
        histogram = CoincidenceHistogram.merge_all(h for h, _, _ in chunk_results)
        point_histograms.append(histogram)
        coincidences.append(window_counts(histogram, s.detection.window)[0])
        for _, counts, _ in chunk_results:
            provenance.update(counts)
        if keep_records:
            all_records.extend(r for _, _, r in chunk_results)

    floor = s.gates_per_point * accidental_probability_per_gate(s) * s.window_fraction
    return FringeScan(
        engine=ENGINE_MONTECARLO,
        scenario_name=s.name,
        scenario_hash=s.scenario_hash,
        seed=s.seed,
        phases=np.asarray(s.phase_points),
        coincidences=np.asarray(coincidences, dtype=np.int64),
        gates=np.full(len(s.phase_points), s.gates_per_point),
        noise_floor=floor,
        histogram=CoincidenceHistogram.merge_all(point_histograms),
        point_histograms=point_histograms,
        records=DetectionRecords.concatenate(all_records) if keep_records else None,
        provenance_counts={name: provenance[name] for name in PROVENANCE_NAMES},
        warnings=warnings,
    )


def run_engine(s: ScenarioSpec, engine: str, **options: Any) -> FringeScan:
    """按名称分派引擎"""
    if engine == ENGINE_ANALYTIC:
        return run_analytic(s)
    if engine == ENGINE_MONTECARLO:
        return run_scan(s, **options)
    raise DomainError(f"未知引擎 {engine!r}，可选 {', '.join(ENGINES)}")


# === 引擎比较 ===


@dataclass
class AgreementReport:
    """Monte-Carlo 与闭式期望的逐点比较（Poisson z 分数）"""

    z_scores: List[float]
    threshold: float

    @property
    def max_abs_z(self) -> float:
        return max((abs(z) for z in self.z_scores), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z_scores": list(self.z_scores),
            "max_abs_z": self.max_abs_z,
            "threshold": self.threshold,
            "passed": self.passed,
        }


def agreement_report(
    montecarlo: FringeScan, analytic: FringeScan, threshold: float = DEFAULT_AGREEMENT_Z
) -> AgreementReport:
    """
    逐点 z = (MC − 期望) / √max(期望, 1)

    Raises:
        DomainError: 两次扫描相位网格或门数不同
    """
    if not (
        np.array_equal(montecarlo.phases, analytic.phases) and np.array_equal(montecarlo.gates, analytic.gates)
    ):
        raise DomainError("两次扫描的相位网格或门数不一致")
    z_scores = [
        (float(mc) - float(ex)) / math.sqrt(max(float(ex), 1.0))
        for mc, ex in zip(montecarlo.coincidences, analytic.coincidences)
    ]
    return AgreementReport(z_scores=z_scores, threshold=threshold)
