# coding=utf-8
"""
仿真引擎测试：闭式期望、Monte-Carlo、播种约定
"""

import math

import numpy as np
import pytest

from fransonbench.analysis import analyze_scan, fit_fringe
from fransonbench.core.errors import ConfigError, DomainError, RegimeRefusal
from fransonbench.simulation import (
    agreement_report,
    expected_window_counts,
    run_analytic,
    run_engine,
    run_scan,
)
from fransonbench.simulation.engine import chunk_rng, chunk_sizes, detection_probabilities

from conftest import build_scenario, lossy_idler


class TestAnalytic:
    def test_exactly_sinusoidal(self, small_scenario):
        scan = run_analytic(small_scenario)
        fit = fit_fringe(scan)
        assert np.max(np.abs(fit.evaluate(scan.phases) - scan.coincidences)) < 1e-10 * scan.coincidences.max()

    def test_visibility_invariant_under_transmittance(self, small_data):
        values = []
        for transmittance in (1.0, 0.2, 0.11, 0.06):
            s = build_scenario(lossy_idler(small_data, transmittance))
            values.append(analyze_scan(run_analytic(s), s).net_visibility)
        assert max(values) - min(values) <= 1e-10

    def test_pair_term_scales_with_transmittance(self, small_data):
        full = build_scenario(small_data)
        lossy = build_scenario(lossy_idler(small_data, 0.2))
        pair_full, _ = expected_window_counts(full, 0.3)
        pair_lossy, _ = expected_window_counts(lossy, 0.3)
        assert pair_lossy / pair_full == pytest.approx(0.2, rel=1e-12)

    def test_flat_floor_without_pairs(self, small_data):
        small_data["source"]["pair_probability_per_gate"] = 0.0
        scan = run_analytic(build_scenario(small_data))
        assert np.all(scan.coincidences == scan.coincidences[0])
        assert scan.coincidences[0] == pytest.approx(scan.noise_floor)
        assert scan.noise_floor > 0

    def test_noiseless_minimum_is_zero(self, small_data):
        small_data["interferometers"]["signal"]["intrinsic_visibility"] = 1.0
        small_data["detectors"]["idler"]["dark_count_probability_per_gate"] = 0.0
        small_data["detectors"]["signal"]["jitter_ps"] = 0.0
        small_data["detectors"]["idler"]["jitter_ps"] = 0.0
        small_data["phase_steps"] = 2
        s = build_scenario(small_data)
        pair, floor = expected_window_counts(s, math.pi)
        assert pair == pytest.approx(0.0, abs=1e-12)
        # 双光子对偶然符合仍然存在
        assert floor > 0

    def test_pair_term_formula_without_jitter(self, small_data):
        small_data["detectors"]["signal"]["jitter_ps"] = 0.0
        small_data["detectors"]["idler"]["jitter_ps"] = 0.0
        s = build_scenario(small_data)
        p_signal, p_idler = detection_probabilities(s)
        mu = s.source.pair_probability_per_gate
        for phase in s.phase_points:
            pair, _ = expected_window_counts(s, phase)
            fringe = 1.0 + 0.93 * math.cos(s.phase_sum(phase))
            assert pair == pytest.approx(s.gates_per_point * p_signal * p_idler * mu * fringe / 8.0 / 0.25, rel=1e-12)

    def test_other_signal_port_shifts_phase_by_pi(self, small_data):
        same = build_scenario(small_data)
        small_data["interferometers"]["signal"]["monitored_output"] = "out2"
        crossed = build_scenario(small_data)
        for phase in same.phase_points:
            assert expected_window_counts(crossed, phase) == pytest.approx(
                expected_window_counts(same, phase + math.pi), rel=1e-12
            )

    def test_regime_refusal(self, small_data):
        small_data["source"]["pump_coherence_length_m"] = 0.5
        with pytest.raises(RegimeRefusal) as info:
            run_analytic(build_scenario(small_data))
        assert info.value.report.failed_flags() == ["a:pump_coherence"]

    def test_unknown_engine(self, small_scenario):
        with pytest.raises(DomainError):
            run_engine(small_scenario, "quantum")


class TestMonteCarlo:
    def test_agrees_with_analytic(self, small_scenario):
        mc = run_scan(small_scenario, chunk_gates=50000)
        analytic = run_analytic(small_scenario)
        report = agreement_report(mc, analytic)
        assert report.passed, report.z_scores

    def test_worker_count_independent(self, small_scenario):
        one = run_scan(small_scenario, workers=1, chunk_gates=50000)
        two = run_scan(small_scenario, workers=2, chunk_gates=50000)
        assert np.array_equal(one.coincidences, two.coincidences)
        assert np.array_equal(one.histogram.counts, two.histogram.counts)

    def test_same_seed_same_scan(self, small_scenario):
        first = run_scan(small_scenario, chunk_gates=50000)
        second = run_scan(small_scenario, chunk_gates=50000)
        assert np.array_equal(first.coincidences, second.coincidences)
        assert first.scenario_hash == second.scenario_hash

    def test_seed_changes_scan(self, small_scenario):
        first = run_scan(small_scenario)
        second = run_scan(small_scenario.with_overrides(seed=8))
        assert not np.array_equal(first.histogram.counts, second.histogram.counts)

    def test_single_gate_per_point(self, small_scenario):
        scan = run_scan(small_scenario.with_overrides(gates_per_point=1))
        assert scan.n_points == 8
        assert set(scan.coincidences.tolist()) <= {0, 1}
        assert np.all(scan.gates == 1)

    def test_zero_gates_rejected(self, small_scenario, small_data):
        with pytest.raises(DomainError):
            small_scenario.with_overrides(gates_per_point=0)
        small_data["gates_per_point"] = 0
        with pytest.raises(ConfigError):
            build_scenario(small_data)

    def test_records_kept_on_request(self, small_scenario):
        s = small_scenario.with_overrides(gates_per_point=20000, phase_steps=4)
        scan = run_scan(s, chunk_gates=5000, keep_records=True)
        assert scan.records is not None
        assert scan.records.total_gates == 4 * 20000
        assert np.all(np.diff(scan.records.gate_index) > 0)
        assert int(scan.histogram.recorded) == int(np.count_nonzero(scan.records.coincidence_mask()))

    def test_provenance_counts(self, small_scenario):
        scan = run_scan(small_scenario.with_overrides(gates_per_point=20000, phase_steps=4))
        assert set(scan.provenance_counts) == {"pair", "double", "dark"}
        assert scan.provenance_counts["pair"] > 0
        assert sum(scan.provenance_counts.values()) == int(scan.histogram.recorded)
        assert scan.to_dict()["provenance_counts"] == scan.provenance_counts

    @pytest.mark.slow
    def test_dark_floor_matches_analytic(self, small_data):
        small_data["source"]["pair_probability_per_gate"] = 0.0
        small_data["gates_per_point"] = 10_000_000
        small_data["phase_points_rad"] = [0.0]
        s = build_scenario(small_data)
        mc = run_scan(s)
        expected = s.gates_per_point * 3.5e-5 * 0.8
        assert mc.noise_floor == pytest.approx(expected, rel=1e-12)
        assert abs(int(mc.coincidences[0]) - expected) < 3.0 * math.sqrt(expected)


class TestSeeding:
    def test_chunk_sizes(self):
        assert chunk_sizes(600000, 250000) == [250000, 250000, 100000]
        assert chunk_sizes(1, 250000) == [1]
        with pytest.raises(DomainError):
            chunk_sizes(10, 0)

    def test_chunk_streams_independent(self):
        a = chunk_rng(7, 0, 0).random(4)
        b = chunk_rng(7, 0, 1).random(4)
        c = chunk_rng(7, 1, 0).random(4)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert np.array_equal(a, chunk_rng(7, 0, 0).random(4))
