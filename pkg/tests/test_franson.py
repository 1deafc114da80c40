# coding=utf-8
"""
Franson 模型测试：峰概率、相干时间、条件检查
"""

import cmath
import math

import numpy as np
import pytest

from fransonbench.core import (
    InterferometerSpec,
    SourceSpec,
    coherence_length,
    coherence_time,
    franson_outcome_probabilities,
    franson_peak_probabilities,
    franson_regime_check,
)
from fransonbench.core.errors import DomainError

# 50/50 分束器（反射带 i 相位）
BEAM_SPLITTER = np.array([[1.0, 1j], [1j, 1.0]]) / math.sqrt(2.0)


def _single_photon_amplitudes(phase: float):
    """
    单个非平衡干涉仪：从输入口 0 进入，返回 {(臂, 出口): 振幅}

    臂 0 为短臂，臂 1 为长臂（带相位 phase）。
    """
    amplitudes = {}
    for arm in (0, 1):
        arm_phase = cmath.exp(1j * phase) if arm == 1 else 1.0
        for port in (0, 1):
            amplitudes[(arm, port)] = BEAM_SPLITTER[arm, 0] * arm_phase * BEAM_SPLITTER[port, arm]
    return amplitudes


def path_enumeration_oracle(phase_a: float, phase_b: float) -> np.ndarray:
    """
    穷举 SS / SL / LS / LL 四条双光子路径，按到达时间差归类后相干叠加

    Returns:
        (3, 2, 2) 数组 [时间类, 信号出口, 闲频出口]，时间类按 t_idler − t_signal 排列
    """
    a = _single_photon_amplitudes(phase_a)
    b = _single_photon_amplitudes(phase_b)
    probs = np.zeros((3, 2, 2))
    for port_a in (0, 1):
        for port_b in (0, 1):
            # 信号走长臂、闲频走短臂 → 时间差为负
            left = a[(1, port_a)] * b[(0, port_b)]
            right = a[(0, port_a)] * b[(1, port_b)]
            # SS 与 LL 到达时间差相同，不可区分
            center = a[(0, port_a)] * b[(0, port_b)] + a[(1, port_a)] * b[(1, port_b)]
            probs[0, port_a, port_b] = abs(left) ** 2
            probs[1, port_a, port_b] = abs(center) ** 2
            probs[2, port_a, port_b] = abs(right) ** 2
    return probs


def bench_source(**changes) -> SourceSpec:
    params = dict(
        pump_wavelength_nm=532.0,
        pump_coherence_length_m=1000.0,
        signal_center_nm=810.0,
        signal_width_fwhm_nm=2.0,
        idler_center_nm=1550.0,
        idler_width_fwhm_nm=7.0,
        pair_probability_per_gate=0.5,
    )
    params.update(changes)
    return SourceSpec(**params)


class TestPeakProbabilities:
    @pytest.mark.parametrize("phase", np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False))
    def test_matches_path_enumeration(self, phase):
        oracle = path_enumeration_oracle(phase, 0.0)
        # 两个出口在理想分束器下对称，监测口取任一皆可
        expected_peaks = oracle[:, 0, 0]
        assert franson_peak_probabilities(phase, 1.0) == pytest.approx(tuple(expected_peaks), abs=1e-12)
        assert np.allclose(franson_outcome_probabilities(phase, 1.0), oracle, rtol=0.0, atol=1e-12)

    def test_phase_sum_split_between_interferometers(self):
        oracle = path_enumeration_oracle(0.4, 1.1)
        assert franson_peak_probabilities(1.5, 1.0)[1] == pytest.approx(oracle[1, 0, 0], abs=1e-12)

    def test_examples(self):
        assert franson_peak_probabilities(0.0, 1.0) == pytest.approx((1 / 16, 1 / 4, 1 / 16), abs=1e-15)
        assert franson_peak_probabilities(math.pi, 1.0) == pytest.approx((1 / 16, 0.0, 1 / 16), abs=1e-15)
        assert franson_peak_probabilities(1.234, 0.0) == pytest.approx((1 / 16, 1 / 8, 1 / 16), abs=1e-15)

    @pytest.mark.parametrize("v0", [0.0, 0.5, 0.93, 1.0])
    def test_fringe_symmetry(self, v0):
        for phase in np.linspace(0.0, 2.0 * math.pi, 17):
            total = franson_peak_probabilities(phase, v0)[1] + franson_peak_probabilities(phase + math.pi, v0)[1]
            assert total == pytest.approx(0.25, abs=1e-15)

    def test_phase_average_ratio(self):
        phases = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
        peaks = np.array([franson_peak_probabilities(p, 0.93) for p in phases]).mean(axis=0)
        assert peaks.sum() == pytest.approx(0.25, abs=1e-14)
        assert peaks[1] / peaks[0] == pytest.approx(2.0, abs=1e-12)
        assert peaks[2] / peaks[0] == pytest.approx(1.0, abs=1e-12)

    def test_outcome_distribution_normalized(self):
        for phase in (0.0, 0.7, math.pi):
            assert franson_outcome_probabilities(phase, 0.8).sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("v0", [-0.1, 1.01])
    def test_visibility_out_of_range(self, v0):
        with pytest.raises(DomainError):
            franson_peak_probabilities(0.0, v0)


class TestCoherence:
    def test_signal_810(self):
        tau = coherence_time(810.0, 2.0)
        assert 1.05e-12 <= tau <= 1.15e-12
        assert 0.32e-3 <= coherence_length(810.0, 2.0) <= 0.35e-3

    def test_idler_1550(self):
        assert coherence_time(1550.0, 7.0) == pytest.approx(1.14e-12, abs=0.01e-12)

    def test_single_cycle_limit(self):
        assert coherence_time(1000.0, 1000.0) * 299792458.0 == pytest.approx(1000e-9, rel=1e-12)

    @pytest.mark.parametrize("center, width", [(0.0, 2.0), (810.0, 0.0), (-1.0, 2.0)])
    def test_non_positive_inputs(self, center, width):
        with pytest.raises(DomainError):
            coherence_time(center, width)


class TestRegimeCheck:
    def test_bench_configuration_passes(self):
        itf = InterferometerSpec(imbalance_length_m=1.0)
        report = franson_regime_check(bench_source(), itf, itf)
        assert report.passed
        assert report.failed_flags() == []

    def test_short_pump_coherence_fails_a(self):
        itf = InterferometerSpec(imbalance_length_m=1.0)
        report = franson_regime_check(bench_source(pump_coherence_length_m=0.5), itf, itf)
        assert not report.passed
        assert report.failed_flags() == ["a:pump_coherence"]

    def test_mismatched_imbalance_fails_c(self):
        report = franson_regime_check(
            bench_source(),
            InterferometerSpec(imbalance_length_m=1.0),
            InterferometerSpec(imbalance_length_m=1.1),
        )
        assert report.failed_flags() == ["c:imbalance_match"]
        assert report.imbalance_offset_s == pytest.approx(0.3336e-9, rel=1e-3)

    def test_wide_spectrum_fails_b(self):
        itf = InterferometerSpec(imbalance_length_m=0.001)
        report = franson_regime_check(bench_source(), itf, itf)
        assert "b:peak_separation" in report.failed_flags()

    def test_energy_conservation_enforced(self):
        with pytest.raises(DomainError):
            bench_source(pump_wavelength_nm=600.0)
