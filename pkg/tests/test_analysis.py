# coding=utf-8
"""
净可见度分析测试
"""

import math

import numpy as np
import pytest

from fransonbench.analysis import (
    FLOOR_MEASURED,
    FitResult,
    TableRow,
    TransmittanceCheck,
    analyze_scan,
    build_table_row,
    fit_fringe,
    net_visibility,
    noise_floor,
    phase_coverage,
    transmittance_check,
)
from fransonbench.core.errors import DegenerateSignalError, DomainError, FitError
from fransonbench.report import render_table_row
from fransonbench.simulation import (
    ExpectedResults,
    FringeScan,
    equally_spaced_phases,
    load_scenario,
    run_analytic,
    run_scan,
)

from conftest import BUNDLED_SCENARIOS, SCENARIO_DIR, build_scenario, lossy_idler

PHASES = np.asarray(equally_spaced_phases(16))


def fixed_fit(amplitude: float, offset: float) -> FitResult:
    """协方差给定的拟合结果"""
    return FitResult(
        amplitude=amplitude,
        offset=offset,
        phase0=0.0,
        covariance=np.diag([1.0, 1.0, 0.01]),
        chi2=0.0,
        dof=13,
    )


def scan_of(counts, engine: str = "analytic") -> FringeScan:
    counts = np.asarray(counts)
    return FringeScan(
        engine=engine,
        scenario_name="synthetic",
        scenario_hash="",
        seed=0,
        phases=PHASES[: counts.size],
        coincidences=counts,
        gates=np.full(counts.size, 1000),
    )


class TestFit:
    def test_recovers_generating_parameters(self):
        counts = 100.0 + 93.0 * np.cos(PHASES)
        fit = fit_fringe(PHASES, counts)
        assert fit.amplitude == pytest.approx(93.0, abs=1e-9)
        assert fit.offset == pytest.approx(100.0, abs=1e-9)
        assert fit.phase0 == pytest.approx(0.0, abs=1e-9)

    def test_phase_offset_absorbed(self):
        counts = 500.0 + 120.0 * np.cos(PHASES + 0.7)
        fit = fit_fringe(PHASES, counts)
        assert fit.amplitude == pytest.approx(120.0, rel=1e-9)
        assert fit.phase0 == pytest.approx(0.7, abs=1e-9)

    def test_negative_amplitude_moves_to_phase(self):
        fit = fit_fringe(PHASES, 100.0 - 30.0 * np.cos(PHASES))
        assert fit.amplitude == pytest.approx(30.0, rel=1e-9)
        assert abs(fit.phase0) == pytest.approx(math.pi, abs=1e-9)

    def test_flat_scan_amplitude_consistent_with_zero(self):
        rng = np.random.default_rng(21)
        counts = rng.poisson(400.0, PHASES.size)
        fit = fit_fringe(PHASES, counts)
        assert fit.amplitude < 4.0 * fit.amplitude_sigma
        assert fit.amplitude_sigma > 0

    def test_too_few_points(self):
        with pytest.raises(FitError):
            fit_fringe(PHASES[:3], [1.0, 2.0, 3.0])

    def test_narrow_coverage(self):
        phases = np.linspace(0.0, 0.9 * math.pi, 8)
        with pytest.raises(FitError):
            fit_fringe(phases, 100.0 + 10.0 * np.cos(phases))

    def test_equal_phases(self):
        with pytest.raises(FitError):
            fit_fringe(np.zeros(8), np.full(8, 10.0))

    def test_phase_coverage(self):
        assert phase_coverage(PHASES) == pytest.approx(2.0 * math.pi * 15 / 16)
        assert phase_coverage([0.0, 0.0]) == 0.0

    def test_accepts_scan(self):
        scan = scan_of(200.0 + 50.0 * np.cos(PHASES))
        assert fit_fringe(scan).amplitude == pytest.approx(50.0, rel=1e-9)


class TestNetVisibility:
    def test_formula(self):
        result = net_visibility(fixed_fit(46.5, 78.0), 28.0)
        assert result.net_visibility == pytest.approx(0.93, abs=1e-12)
        assert result.net_visibility_sigma > 0
        assert not result.clipped

    def test_zero_floor_gives_raw(self):
        result = net_visibility(fixed_fit(40.0, 100.0), 0.0)
        assert result.net_visibility == pytest.approx(result.raw_visibility)

    def test_monotone_in_floor(self):
        fit = fixed_fit(30.0, 100.0)
        values = [net_visibility(fit, floor).net_visibility for floor in (0.0, 10.0, 20.0, 40.0, 60.0)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_clipped_with_flag(self):
        result = net_visibility(fixed_fit(60.0, 100.0), 50.0)
        assert result.net_visibility == 1.0
        assert result.clipped
        assert result.warnings

    @pytest.mark.parametrize("floor", [100.0, 150.0])
    def test_degenerate_signal(self, floor):
        with pytest.raises(DegenerateSignalError):
            net_visibility(fixed_fit(10.0, 100.0), floor)

    def test_floor_uncertainty_widens_sigma(self):
        fit = fixed_fit(46.5, 78.0)
        assert net_visibility(fit, 28.0, 5.0).net_visibility_sigma > net_visibility(fit, 28.0).net_visibility_sigma


class TestNoiseFloor:
    def test_dark_only_example(self, small_data):
        small_data["source"]["pair_probability_per_gate"] = 0.0
        small_data["gates_per_point"] = 1_000_000
        s = build_scenario(small_data)
        assert s.window_fraction == pytest.approx(0.8)
        assert noise_floor(s) == pytest.approx(28.0, rel=1e-12)

    def test_no_noise(self, small_data):
        small_data["source"]["pair_probability_per_gate"] = 0.0
        small_data["detectors"]["idler"]["dark_count_probability_per_gate"] = 0.0
        assert noise_floor(build_scenario(small_data)) == 0.0

    def test_analytic_scan_returns_intrinsic_visibility(self, small_scenario):
        result = analyze_scan(run_analytic(small_scenario), small_scenario)
        # 侧峰在窗外，中心峰捕获比例相消
        assert result.net_visibility == pytest.approx(0.93, abs=1e-9)

    def test_analytic_floor_carries_poisson_sigma(self, small_scenario):
        result = analyze_scan(run_analytic(small_scenario), small_scenario)
        assert result.noise_floor == pytest.approx(noise_floor(small_scenario), rel=1e-12)
        assert result.noise_floor_sigma == pytest.approx(math.sqrt(noise_floor(small_scenario)), rel=1e-12)
        assert result.net_visibility_sigma > 0

    def test_measured_floor_needs_histogram(self, small_scenario):
        with pytest.raises(DomainError):
            analyze_scan(run_analytic(small_scenario), small_scenario, FLOOR_MEASURED)

    def test_measured_floor_close_to_analytic(self, small_scenario):
        s = small_scenario.with_overrides(gates_per_point=1_000_000)
        result = analyze_scan(run_scan(s), s, FLOOR_MEASURED)
        assert result.noise_floor == pytest.approx(noise_floor(s), abs=5.0 * result.noise_floor_sigma)


class TestTransmittance:
    def test_identical_scans(self, small_scenario):
        scan = run_analytic(small_scenario)
        check = transmittance_check(scan, scan)
        assert check.ratio == pytest.approx(1.0, abs=1e-12)
        assert check.compatible is None

    def test_analytic_ratio_equals_channel(self, small_data):
        small_data["detectors"]["idler"]["dark_count_probability_per_gate"] = 0.0
        reference = build_scenario(small_data)
        sample = build_scenario(lossy_idler(small_data, 0.11))
        check = transmittance_check(run_analytic(reference), run_analytic(sample), expected=0.11)
        assert check.ratio == pytest.approx(0.11, rel=1e-9)
        assert check.compatible

    def test_ratio_of_fitted_maxima(self, small_data):
        reference = build_scenario(small_data)
        sample = build_scenario(lossy_idler(small_data, 0.11))
        scan_ref, scan_sample = run_analytic(reference), run_analytic(sample)
        check = transmittance_check(scan_ref, scan_sample)
        assert check.ratio == pytest.approx(fit_fringe(scan_sample).maximum / fit_fringe(scan_ref).maximum, rel=1e-12)
        # 暗计数偶然符合不随透过率缩放
        assert check.ratio > 0.11

    def test_mismatched_grids(self, small_scenario):
        a = run_analytic(small_scenario)
        b = run_analytic(small_scenario.with_overrides(phase_steps=12))
        with pytest.raises(DomainError):
            transmittance_check(a, b)

    def test_table_row_from_monte_carlo(self, small_data):
        small_data["expected"] = {
            "reference_visibility": 0.93,
            "sample_visibility": 0.93,
            "transmittance": 0.2,
            "visibility_tolerance": 0.05,
        }
        small_data["gates_per_point"] = 4_000_000
        small_data["channels"]["idler"] = {
            "kind": "lrspp",
            "base_insertion_loss_db": 3.0,
            "lrspp": {
                "stripe_length_cm": 0.5,
                "stripe_width_um": 8.0,
                "stripe_thickness_nm": 20.0,
                "cladding_index": 1.535,
                "propagation_loss_db_per_cm": 8.0,
                "coupling_loss_per_facet_db": 1.495,
            },
        }
        s = build_scenario(small_data)
        row = build_table_row(s, run_scan(s.reference()), run_scan(s))
        assert row.transmittance.ratio == pytest.approx(0.2, abs=5.0 * row.transmittance.sigma)
        assert row.sample.transmittance_ratio == row.transmittance.ratio
        assert row.to_dict()["label"] == "small test scenario"


class TestTableRow:
    EXPECTED = ExpectedResults(
        reference_visibility=0.93,
        sample_visibility=0.93,
        transmittance=0.2,
        visibility_tolerance=0.03,
    )

    @staticmethod
    def row(reference: FitResult, sample: FitResult) -> TableRow:
        return TableRow(
            label="synthetic",
            engine="analytic",
            reference=net_visibility(reference, 0.0),
            sample=net_visibility(sample, 0.0),
            transmittance=TransmittanceCheck(ratio=0.2, sigma=0.01, expected=0.2),
            expected=TestTableRow.EXPECTED,
        )

    def test_fixed_tolerance_ignores_large_sigma(self):
        noisy = FitResult(
            amplitude=89.0,
            offset=100.0,
            phase0=0.0,
            covariance=np.diag([400.0, 400.0, 0.01]),
            chi2=0.0,
            dof=13,
        )
        row = self.row(fixed_fit(93.0, 100.0), noisy)
        # 偏差 0.04 落在 2σ 之内，但超出固定容差
        assert 2.0 * row.sample.net_visibility_sigma > 0.04
        assert row.reference_matches is True
        assert row.sample_matches is False
        assert row.visibility_preserved is False
        assert not row.passed

    def test_within_tolerance_passes(self):
        row = self.row(fixed_fit(93.0, 100.0), fixed_fit(91.0, 100.0))
        assert row.passed
        assert not row.clipped
        assert row.to_dict()["clipped"] is False

    def test_clipped_visibility_flagged(self):
        row = self.row(fixed_fit(93.0, 100.0), fixed_fit(110.0, 100.0))
        assert row.sample.net_visibility == 1.0
        assert row.clipped
        assert row.to_dict()["clipped"] is True
        assert "截断" in render_table_row(row)


@pytest.mark.slow
@pytest.mark.parametrize("name", BUNDLED_SCENARIOS)
def test_bundled_scenario_reproduces_expected_row(name):
    s = load_scenario(SCENARIO_DIR / f"{name}.yaml")
    row = build_table_row(s, run_scan(s.reference(), workers=2), run_scan(s, workers=2))
    tolerance = s.expected.visibility_tolerance
    assert abs(row.reference.net_visibility - s.expected.reference_visibility) <= tolerance
    assert abs(row.sample.net_visibility - s.expected.sample_visibility) <= tolerance
    assert row.transmittance.compatible
    assert not row.clipped
    assert row.passed


@pytest.mark.slow
def test_estimator_calibration(small_data):
    """200 次不同种子的扫描：均值无偏，报告的 σ 覆盖率约 68%"""
    small_data["interferometers"]["signal"]["intrinsic_visibility"] = 0.931
    small_data["source"]["pair_probability_per_gate"] = 0.05
    small_data["gates_per_point"] = 400_000
    # σ 约 0.006，截断到 1 的概率可忽略
    small_data["channels"]["signal"]["base_insertion_loss_db"] = 0.0
    small_data["channels"]["idler"]["base_insertion_loss_db"] = 0.0
    small_data["detectors"]["signal"]["efficiency"] = 1.0
    small_data["detectors"]["idler"]["efficiency"] = 0.5
    base = build_scenario(small_data)
    values, sigmas = [], []
    for seed in range(200):
        s = base.with_overrides(seed=seed)
        result = analyze_scan(run_scan(s), s)
        values.append(result.net_visibility)
        sigmas.append(result.net_visibility_sigma)
    values = np.asarray(values)
    sigmas = np.asarray(sigmas)
    assert abs(values.mean() - 0.931) < 2.0 * values.std(ddof=1) / math.sqrt(values.size)
    coverage = np.mean(np.abs(values - 0.931) <= sigmas)
    assert 0.61 <= coverage <= 0.75
