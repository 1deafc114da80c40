# coding=utf-8
"""
门控单光子探测模拟

每个门是 InGaAs APD 的一个开门时隙，由 Si APD（探测器 A）的计数触发。
每个门做一次分类抽样，事件互斥：
- C0 / C1 / C2: 真光子对符合，落在左 / 中 / 右时间峰（A、B 都响应）
- SIGNAL_ONLY: 只有信号光被 A 探测，B 无响应
- IDLER_ONLY: 信号光丢失，A 无响应；B 为门控探测器时门未打开，不留记录
- DOUBLE: 双光子对偶然符合，时间差在门内均匀分布
- DARK: 门内 B 的暗计数与 A 的计数构成偶然符合，时间差在门内均匀分布
- SIGNAL_DARK: A 的暗计数单独打开门，B 无响应
- NONE: 无事件

光子对按 μ / MONITORED_SHARE 的概率产生，出射端口由两台干涉仪的监测端口决定。
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Tuple

import numpy as np

from fransonbench.core.errors import DomainError
from fransonbench.core.franson import franson_outcome_probabilities, pair_emission_probability

DETECTOR_KINDS = ("free_running", "gated")

# 事件来源标记（仅供诊断，分析模块不读取）
PROVENANCE_PAIR = 0
PROVENANCE_DOUBLE = 1
PROVENANCE_DARK = 2
PROVENANCE_NAMES = ("pair", "double", "dark")

CATEGORY_SIGNAL_ONLY = 3
CATEGORY_IDLER_ONLY = 4
CATEGORY_DOUBLE = 5
CATEGORY_DARK = 6
CATEGORY_SIGNAL_DARK = 7
CATEGORY_NONE = 8
CATEGORY_NAMES = ("C0", "C1", "C2", "signal_only", "idler_only", "double", "dark", "signal_dark", "none")

_CLICKS_A = np.array([True, True, True, True, False, True, True, True, False])
_CLICKS_B = np.array([True, True, True, False, True, True, True, False, False])


@dataclass(frozen=True)
class DetectorSpec:
    """
    单光子探测器

    Args:
        kind: free_running（Si APD）或 gated（InGaAs APD）
        efficiency: 探测效率 ∈ (0, 1]
        dark_count_probability_per_gate: 每门暗计数概率 ∈ [0, 1)
        gate_width_ns: 门宽
        jitter_ps: 高斯时间抖动标准差，0 表示无抖动
    """

    kind: str
    efficiency: float
    dark_count_probability_per_gate: float = 0.0
    gate_width_ns: float = 2.5
    jitter_ps: float = 0.0

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise DomainError(f"未知探测器类型 {self.kind!r}，可选 {', '.join(DETECTOR_KINDS)}")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError(f"efficiency 必须在 (0, 1] 内，当前 {self.efficiency!r}")
        if not 0.0 <= self.dark_count_probability_per_gate < 1.0:
            raise DomainError("dark_count_probability_per_gate 必须在 [0, 1) 内")
        if self.kind == "gated" and not self.gate_width_ns > 0:
            raise DomainError("门控探测器的 gate_width_ns 必须为正")
        if self.jitter_ps < 0:
            raise DomainError("jitter_ps 不能为负")

    @property
    def gate_width_ps(self) -> float:
        return self.gate_width_ns * 1e3

    @property
    def is_gated(self) -> bool:
        return self.kind == "gated"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class PairArrival:
    """
    一个门内光子对的到达描述

    outcome_probabilities: franson_outcome_probabilities 给出的 (3, 2, 2) 分布
    peak_offsets_ps: 三个时间类的时间差 t_idler − t_signal，即 (−Δt_s, 0, +Δt_i)
    ports: (信号监测端口, 闲频监测端口) 下标
    """

    pair_probability: float
    outcome_probabilities: np.ndarray
    peak_offsets_ps: Tuple[float, float, float]
    ports: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        pair_emission_probability(self.pair_probability)

    @property
    def emission_probability(self) -> float:
        return pair_emission_probability(self.pair_probability)

    @classmethod
    def from_interferometers(
        cls,
        pair_probability: float,
        phase_sum: float,
        v0: float,
        signal_imbalance_ps: float,
        idler_imbalance_ps: float,
        ports: Tuple[int, int] = (0, 0),
    ) -> "PairArrival":
        return cls(
            pair_probability=pair_probability,
            outcome_probabilities=franson_outcome_probabilities(phase_sum, v0),
            peak_offsets_ps=(-signal_imbalance_ps, 0.0, idler_imbalance_ps),
            ports=ports,
        )

    def monitored_outcomes(self) -> np.ndarray:
        """两路都从监测端口出射时三个时间类的概率"""
        signal_port, idler_port = self.ports
        return self.outcome_probabilities[:, signal_port, idler_port]


def double_pair_probability(pair_probability: float, signal_detection: float, idler_detection: float) -> float:
    """每门双光子对偶然符合概率 μ²·(T_s η_s / 2)·(T_i η_i / 2)"""
    return pair_probability ** 2 * (signal_detection / 2.0) * (idler_detection / 2.0)


def accidental_dark_probability(detectors: Tuple[DetectorSpec, DetectorSpec]) -> float:
    """每门暗计数偶然符合概率：已打开的门内闲频探测器的暗计数"""
    return detectors[1].dark_count_probability_per_gate


def combined_jitter_ps(detectors: Tuple[DetectorSpec, DetectorSpec]) -> float:
    return float(np.hypot(detectors[0].jitter_ps, detectors[1].jitter_ps))


def gate_category_probabilities(
    pair: PairArrival,
    detectors: Tuple[DetectorSpec, DetectorSpec],
    channels: Tuple[float, float],
) -> np.ndarray:
    """
    每门事件类别概率，顺序见 CATEGORY_NAMES

    Raises:
        DomainError: 概率越界或总和超过 1
    """
    t_signal, t_idler = channels
    if not (0.0 <= t_signal <= 1.0 and 0.0 <= t_idler <= 1.0):
        raise DomainError(f"通道透过率必须在 [0, 1] 内，当前 {channels!r}")

    emission = pair.emission_probability
    p_signal = t_signal * detectors[0].efficiency
    p_idler = t_idler * detectors[1].efficiency

    signal_port, idler_port = pair.ports
    monitored = pair.monitored_outcomes()
    signal_monitored = pair.outcome_probabilities[:, signal_port, :].sum()
    idler_monitored = pair.outcome_probabilities[:, :, idler_port].sum()
    both = p_signal * p_idler * monitored.sum()

    coincidences = emission * p_signal * p_idler * monitored
    signal_only = emission * (p_signal * signal_monitored - both)
    idler_only = emission * (p_idler * idler_monitored - both)
    double = double_pair_probability(pair.pair_probability, p_signal, p_idler)
    dark = accidental_dark_probability(detectors)
    signal_dark = detectors[0].dark_count_probability_per_gate

    probs = np.concatenate([coincidences, [signal_only, idler_only, double, dark, signal_dark]])
    total = probs.sum()
    if total > 1.0:
        raise DomainError(f"每门事件概率之和 {total:.4f} 超过 1，请降低 μ 或暗计数概率")
    return np.append(probs, 1.0 - total)


@dataclass
class DetectionRecords:
    """
    探测记录（只保留有探测器响应的门）

    dt_ps 为 t_idler − t_signal，A、B 没有同时响应时为 NaN。
    """

    gate_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    dt_ps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=float))
    detector_a: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    detector_b: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    provenance: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    total_gates: int = 0

    def __len__(self) -> int:
        return int(self.gate_index.size)

    def coincidence_mask(self) -> np.ndarray:
        return self.detector_a & self.detector_b

    def coincidence_dt(self) -> np.ndarray:
        return self.dt_ps[self.coincidence_mask()]

    def provenance_counts(self) -> Dict[str, int]:
        """符合事件按来源计数（诊断输出）"""
        mask = self.coincidence_mask()
        return {
            name: int(np.count_nonzero(self.provenance[mask] == code))
            for code, name in enumerate(PROVENANCE_NAMES)
        }

    def to_rows(self) -> List[Tuple[int, str, int, int]]:
        """CSV 行：gate_index, dt_ps, detectorA, detectorB"""
        rows = []
        for gate, dt, a, b in zip(self.gate_index, self.dt_ps, self.detector_a, self.detector_b):
            rows.append((int(gate), "" if np.isnan(dt) else repr(float(dt)), int(a), int(b)))
        return rows

    @classmethod
    def concatenate(cls, parts: Iterable["DetectionRecords"]) -> "DetectionRecords":
        parts = list(parts)
        if not parts:
            return cls()
        return cls(
            gate_index=np.concatenate([p.gate_index for p in parts]),
            dt_ps=np.concatenate([p.dt_ps for p in parts]),
            detector_a=np.concatenate([p.detector_a for p in parts]),
            detector_b=np.concatenate([p.detector_b for p in parts]),
            provenance=np.concatenate([p.provenance for p in parts]),
            total_gates=sum(p.total_gates for p in parts),
        )


def simulate_gate_outcomes(
    pair: PairArrival,
    detectors: Tuple[DetectorSpec, DetectorSpec],
    channels: Tuple[float, float],
    rng: np.random.Generator,
    n_gates: int = 1,
    first_gate_index: int = 0,
) -> DetectionRecords:
    """
    模拟 n_gates 个门的探测结果

    随机数抽取顺序固定：类别均匀数 → 偶然符合时间差 → 抖动。
    闲频探测器为 gated 时，A 未响应的门不打开，B 不会留下记录。

    Args:
        pair: 光子对到达描述
        detectors: (信号探测器 A, 闲频探测器 B)，B 的门宽决定偶然符合时间范围
        channels: (信号通道透过率, 闲频通道透过率)
        rng: 已播种的随机数生成器
        n_gates: 门数
        first_gate_index: 第一个门的全局编号

    Returns:
        DetectionRecords
    """
    if n_gates < 0:
        raise DomainError("n_gates 不能为负")

    probs = gate_category_probabilities(pair, detectors, channels)
    edges = np.cumsum(probs[:-1])
    category = np.searchsorted(edges, rng.random(n_gates), side="right")

    recorded = category != CATEGORY_NONE
    if detectors[1].is_gated:
        recorded &= category != CATEGORY_IDLER_ONLY
    gates = np.flatnonzero(recorded).astype(np.int64)
    category = category[recorded]

    dt = np.full(gates.size, np.nan)
    is_pair = category < CATEGORY_SIGNAL_ONLY
    offsets = np.asarray(pair.peak_offsets_ps, dtype=float)
    dt[is_pair] = offsets[category[is_pair]]

    accidental = (category == CATEGORY_DOUBLE) | (category == CATEGORY_DARK)
    half_gate = detectors[1].gate_width_ps / 2.0
    dt[accidental] = rng.uniform(-half_gate, half_gate, size=int(accidental.sum()))

    jitter = combined_jitter_ps(detectors)
    if jitter > 0:
        dt[is_pair] += rng.normal(0.0, jitter, size=int(is_pair.sum()))

    provenance = np.full(gates.size, PROVENANCE_PAIR, dtype=np.int8)
    provenance[category == CATEGORY_DOUBLE] = PROVENANCE_DOUBLE
    provenance[(category == CATEGORY_DARK) | (category == CATEGORY_SIGNAL_DARK)] = PROVENANCE_DARK

    return DetectionRecords(
        gate_index=gates + first_gate_index,
        dt_ps=dt,
        detector_a=_CLICKS_A[category],
        detector_b=_CLICKS_B[category],
        provenance=provenance,
        total_gates=n_gates,
    )
