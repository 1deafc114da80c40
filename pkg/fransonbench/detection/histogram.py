# coding=utf-8
"""
TAC 符合直方图与时间窗

- build_histogram: 按时间差分箱，超出范围的记录计入 dropped
- window_counts: 按箱中心是否落在窗内划分计数
- check_window: 时间窗与侧峰重叠检查
- estimate_floor: 从直方图平坦区估计窗内偶然符合底
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from fransonbench.core.errors import DomainError
from fransonbench.detection.detectors import DetectionRecords

logger = logging.getLogger(__name__)

DEFAULT_BIN_WIDTH_PS = 100.0
DEFAULT_RANGE_PS = (-5000.0, 5000.0)


@dataclass
class CoincidenceHistogram:
    """
    符合时间差直方图

    第 k 个箱覆盖 [origin + k·bin_width, origin + (k+1)·bin_width)。
    """

    bin_width_ps: float
    origin_ps: float
    counts: np.ndarray
    total_gates: int = 0
    dropped: int = 0

    def __post_init__(self):
        if not self.bin_width_ps > 0:
            raise DomainError(f"bin_width 必须为正，当前 {self.bin_width_ps!r}")
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(self.counts < 0):
            raise DomainError("直方图计数不能为负")

    @property
    def n_bins(self) -> int:
        return int(self.counts.size)

    @property
    def range_ps(self) -> Tuple[float, float]:
        return self.origin_ps, self.origin_ps + self.n_bins * self.bin_width_ps

    @property
    def bin_centers_ps(self) -> np.ndarray:
        return self.origin_ps + (np.arange(self.n_bins) + 0.5) * self.bin_width_ps

    @property
    def recorded(self) -> int:
        """进入 TAC 的记录总数（含超范围丢弃）"""
        return int(self.counts.sum()) + self.dropped

    def is_compatible(self, other: "CoincidenceHistogram") -> bool:
        return (
            self.bin_width_ps == other.bin_width_ps
            and self.origin_ps == other.origin_ps
            and self.n_bins == other.n_bins
        )

    def merge(self, other: "CoincidenceHistogram") -> "CoincidenceHistogram":
        """逐箱相加（结合律、交换律成立）"""
        if not self.is_compatible(other):
            raise DomainError("直方图分箱不一致，无法合并")
        return CoincidenceHistogram(
            bin_width_ps=self.bin_width_ps,
            origin_ps=self.origin_ps,
            counts=self.counts + other.counts,
            total_gates=self.total_gates + other.total_gates,
            dropped=self.dropped + other.dropped,
        )

    @classmethod
    def merge_all(cls, histograms: Iterable["CoincidenceHistogram"]) -> "CoincidenceHistogram":
        histograms = list(histograms)
        if not histograms:
            raise DomainError("没有可合并的直方图")
        merged = histograms[0]
        for h in histograms[1:]:
            merged = merged.merge(h)
        return merged

    def to_rows(self) -> List[Tuple[float, int]]:
        """CSV 行：bin_center_ps, count"""
        return [(float(c), int(n)) for c, n in zip(self.bin_centers_ps, self.counts)]


def _bin_count(bin_width_ps: float, range_ps: Tuple[float, float]) -> int:
    low, high = range_ps
    if not bin_width_ps > 0 or not math.isfinite(bin_width_ps):
        raise DomainError(f"bin_width 必须为正，当前 {bin_width_ps!r}")
    if not high > low:
        raise DomainError(f"直方图范围无效: {range_ps!r}")
    n_bins = (high - low) / bin_width_ps
    rounded = round(n_bins)
    if rounded < 1 or abs(n_bins - rounded) > 1e-9 * max(1.0, n_bins):
        raise DomainError(f"bin_width {bin_width_ps} ps 不能整除范围 {range_ps!r}")
    return int(rounded)


def build_histogram(
    records: Union[DetectionRecords, Sequence[float], np.ndarray],
    bin_width_ps: float = DEFAULT_BIN_WIDTH_PS,
    range_ps: Tuple[float, float] = DEFAULT_RANGE_PS,
    total_gates: Optional[int] = None,
) -> CoincidenceHistogram:
    """
    将符合记录按时间差分箱

    Args:
        records: DetectionRecords（只取两路都响应的记录）或时间差数组 (ps)
        bin_width_ps: 箱宽，必须整除范围
        range_ps: [low, high)
        total_gates: 门数，None 时取 records.total_gates

    Raises:
        DomainError: 箱宽非正或不能整除范围
    """
    n_bins = _bin_count(bin_width_ps, range_ps)
    low, _ = range_ps

    if isinstance(records, DetectionRecords):
        dt = records.coincidence_dt()
        gates = records.total_gates if total_gates is None else total_gates
    else:
        dt = np.asarray(records, dtype=float)
        gates = 0 if total_gates is None else total_gates

    index = np.floor((dt - low) / bin_width_ps).astype(np.int64)
    inside = (index >= 0) & (index < n_bins)
    counts = np.bincount(index[inside], minlength=n_bins)

    return CoincidenceHistogram(
        bin_width_ps=float(bin_width_ps),
        origin_ps=float(low),
        counts=counts,
        total_gates=int(gates),
        dropped=int(dt.size - np.count_nonzero(inside)),
    )


@dataclass(frozen=True)
class WindowSelection:
    """时间窗判别器：center ± half_width (ps)"""

    center_ps: float = 0.0
    half_width_ps: float = 1000.0

    def __post_init__(self):
        if not self.half_width_ps > 0:
            raise DomainError(f"half_width 必须为正，当前 {self.half_width_ps!r}")

    @property
    def bounds_ps(self) -> Tuple[float, float]:
        return self.center_ps - self.half_width_ps, self.center_ps + self.half_width_ps


def window_bin_slice(
    window: WindowSelection, bin_width_ps: float, origin_ps: float, n_bins: int
) -> slice:
    """箱中心落在窗内的箱的下标区间"""
    low, high = window.bounds_ps
    first = math.ceil((low - origin_ps) / bin_width_ps - 0.5)
    last = math.floor((high - origin_ps) / bin_width_ps - 0.5)
    first = max(first, 0)
    last = min(last, n_bins - 1)
    return slice(first, max(last + 1, first))


def effective_window_bounds(
    window: WindowSelection,
    bin_width_ps: float = DEFAULT_BIN_WIDTH_PS,
    range_ps: Tuple[float, float] = DEFAULT_RANGE_PS,
) -> Tuple[float, float]:
    """分箱后窗实际覆盖的时间区间（被选中箱的外沿）"""
    n_bins = _bin_count(bin_width_ps, range_ps)
    origin = range_ps[0]
    selected = window_bin_slice(window, bin_width_ps, origin, n_bins)
    return origin + selected.start * bin_width_ps, origin + selected.stop * bin_width_ps


def window_counts(
    h: CoincidenceHistogram,
    window: WindowSelection,
    imbalance_ps: Optional[Sequence[float]] = None,
) -> Tuple[int, int]:
    """
    窗内 / 窗外计数（窗内外之和 + dropped = recorded）

    给出 imbalance_ps 时先做 check_window，窗收进侧峰只记 warning 日志，筛选照常进行。
    一次扫描只需要一条警告记录，引擎在运行前调用 check_window 收集，逐点计数时不再传入。

    Args:
        h: 直方图
        window: 时间窗
        imbalance_ps: 两台干涉仪的不平衡时间，用于侧峰检查

    Raises:
        DomainError: 窗超出直方图范围
    """
    if imbalance_ps is not None:
        check_window(window, imbalance_ps)
    low, high = window.bounds_ps
    range_low, range_high = h.range_ps
    if low < range_low or high > range_high:
        raise DomainError(f"时间窗 [{low:g}, {high:g}] ps 超出直方图范围 [{range_low:g}, {range_high:g}) ps")
    selected = window_bin_slice(window, h.bin_width_ps, h.origin_ps, h.n_bins)
    in_window = int(h.counts[selected].sum())
    return in_window, int(h.counts.sum()) - in_window


def check_window(window: WindowSelection, imbalance_ps: Sequence[float]) -> List[str]:
    """
    时间窗是否会收进侧峰

    Returns:
        警告记录列表，空表示通过
    """
    warnings = []
    shortest = min(imbalance_ps)
    if window.half_width_ps >= shortest / 2.0:
        message = (
            f"时间窗半宽 {window.half_width_ps:g} ps ≥ 最小不平衡时间的一半 {shortest / 2.0:.1f} ps，"
            f"窗内会混入侧峰"
        )
        logger.warning(message)
        warnings.append(message)
    return warnings


def accidental_window_fraction(
    window: WindowSelection,
    gate_width_ps: float,
    bin_width_ps: float = DEFAULT_BIN_WIDTH_PS,
    range_ps: Tuple[float, float] = DEFAULT_RANGE_PS,
) -> float:
    """门内均匀偶然符合落入（分箱后）时间窗的比例 f"""
    low, high = effective_window_bounds(window, bin_width_ps, range_ps)
    half_gate = gate_width_ps / 2.0
    overlap = min(high, half_gate) - max(low, -half_gate)
    return max(overlap, 0.0) / gate_width_ps


@dataclass
class MeasuredFloor:
    """直方图平坦区估计的窗内偶然符合底"""

    value: float
    sigma: float
    region_counts: int
    region_width_ps: float
    warnings: List[str] = field(default_factory=list)


def estimate_floor(
    h: CoincidenceHistogram,
    window: WindowSelection,
    gate_width_ps: float,
    peak_offsets_ps: Sequence[float],
    guard_ps: float = 300.0,
) -> MeasuredFloor:
    """
    用门内、远离各时间峰的箱估计窗内偶然符合底

    密度 = 平坦区计数 / 平坦区宽度，底 = 密度 × 窗与门的重叠宽度，
    Poisson 不确定度来自平坦区计数。

    Raises:
        DomainError: 没有可用的平坦区
    """
    edges_low = h.origin_ps + np.arange(h.n_bins) * h.bin_width_ps
    edges_high = edges_low + h.bin_width_ps
    centers = h.bin_centers_ps
    half_gate = gate_width_ps / 2.0

    usable = (edges_low >= -half_gate) & (edges_high <= half_gate)
    for offset in peak_offsets_ps:
        usable &= np.abs(centers - offset) > guard_ps

    if not np.any(usable):
        raise DomainError("门内没有远离时间峰的平坦区，无法估计噪声底")

    region_counts = int(h.counts[usable].sum())
    region_width = float(usable.sum() * h.bin_width_ps)

    low, high = effective_window_bounds(window, h.bin_width_ps, h.range_ps)
    overlap = max(min(high, half_gate) - max(low, -half_gate), 0.0)
    scale = overlap / region_width

    warnings = []
    if region_counts == 0:
        message = "平坦区计数为 0，噪声底估计为 0"
        logger.warning(message)
        warnings.append(message)

    return MeasuredFloor(
        value=region_counts * scale,
        sigma=math.sqrt(max(region_counts, 1)) * scale,
        region_counts=region_counts,
        region_width_ps=region_width,
        warnings=warnings,
    )
