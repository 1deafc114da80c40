# coding=utf-8
"""
应用配置、场景解析、存储与报告测试
"""

import pytest

from fransonbench.context import AppContext
from fransonbench.core import FieldReader, load_config
from fransonbench.core.errors import ConfigError
from fransonbench.report import format_percent, format_verdict, render_table_row, render_validation
from fransonbench.simulation import ScenarioSpec, load_scenario
from fransonbench.storage import LocalArtifactBackend
from fransonbench.utils import run_date_folder

from conftest import BUNDLED_SCENARIOS, SCENARIO_DIR, build_scenario


class TestLoadConfig:
    def test_bundled_config(self, config_path):
        config = load_config(str(config_path))
        assert config["WORKERS"] == 1
        assert config["CHUNK_GATES"] == 250000
        assert config["NOISE_FLOOR_SOURCE"] == "analytic"
        assert config["PLASMONICS"]["SPECTRUM_STEP_NM"] == 0.05
        assert config["CONFIG_PATH"] == str(config_path)

    def test_env_overrides(self, config_path, monkeypatch):
        monkeypatch.setenv("FRANSON_WORKERS", "4")
        monkeypatch.setenv("FRANSON_LOG_LEVEL", "debug")
        monkeypatch.setenv("FRANSON_USE_DATE_FOLDER", "false")
        config = load_config(str(config_path))
        assert config["WORKERS"] == 4
        assert config["LOG_LEVEL"] == "DEBUG"
        assert config["USE_DATE_FOLDER"] is False

    def test_config_path_env(self, config_path, monkeypatch):
        monkeypatch.setenv("CONFIG_PATH", str(config_path))
        assert load_config()["CONFIG_PATH"] == str(config_path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "config.yaml"))

    def test_syntax_error(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("app:\n  timezone: [\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_unknown_timezone(self, config_path, monkeypatch):
        monkeypatch.setenv("FRANSON_TIMEZONE", "Mars/Olympus_Mons")
        with pytest.raises(ConfigError, match="app.timezone"):
            load_config(str(config_path))


class TestScenarioFiles:
    @pytest.mark.parametrize("name", BUNDLED_SCENARIOS)
    def test_bundled_scenarios_valid(self, name):
        s = load_scenario(SCENARIO_DIR / f"{name}.yaml")
        assert s.name == name
        assert s.regime_report().passed
        assert s.protocol_warnings() == []
        assert s.window_fraction == pytest.approx(0.8)
        assert s.expected is not None
        assert s.expected.visibility_tolerance == (0.005 if name == "lrspp_1550" else 0.03)
        assert s.source.pair_probability_per_gate <= 0.25

    def test_bundled_transmittances(self):
        _, idler = load_scenario(SCENARIO_DIR / "lrspp_1550.yaml").channel_transmittances()
        assert idler == pytest.approx(0.891 * 0.2, abs=1e-3)
        signal, _ = load_scenario(SCENARIO_DIR / "eot_810.yaml").channel_transmittances()
        assert signal == pytest.approx(0.891 * 0.11, abs=1e-3)

    def test_reference_removes_elements(self):
        s = load_scenario(SCENARIO_DIR / "eot_810.yaml")
        reference = s.reference()
        assert not reference.channel_signal.has_element
        assert reference.channel_transmittances()[0] == pytest.approx(0.891, abs=1e-3)
        assert reference.scenario_hash != s.scenario_hash

    def test_dict_round_trip_hash(self):
        s = load_scenario(SCENARIO_DIR / "eot_810.yaml")
        assert ScenarioSpec.from_dict(s.to_dict()).scenario_hash == s.scenario_hash

    def test_hash_changes_with_seed(self, small_scenario):
        assert small_scenario.with_overrides(seed=1).scenario_hash != small_scenario.scenario_hash

    def test_both_channels_loaded_warns(self, small_data):
        stripe = {
            "stripe_length_cm": 0.5,
            "stripe_width_um": 8.0,
            "stripe_thickness_nm": 20.0,
            "cladding_index": 1.535,
            "propagation_loss_db_per_cm": 8.0,
            "coupling_loss_per_facet_db": 1.495,
        }
        for side in ("signal", "idler"):
            small_data["channels"][side] = {"kind": "lrspp", "lrspp": dict(stripe)}
        assert len(build_scenario(small_data).protocol_warnings()) == 1

    def test_invariant_violation_points_at_section(self, small_data):
        small_data["detectors"]["idler"]["efficiency"] = 1.5
        with pytest.raises(ConfigError, match="detectors.idler"):
            build_scenario(small_data)

    def test_wrong_type(self):
        reader = FieldReader({"source": {"signal_center_nm": "810"}})
        with pytest.raises(ConfigError, match="source.signal_center_nm"):
            reader.section("source").number("signal_center_nm")

    def test_unsupported_schema_version(self, small_data):
        small_data["schema_version"] = 2
        with pytest.raises(ConfigError, match="schema_version"):
            build_scenario(small_data)

    def test_pair_probability_above_quarter(self, small_data):
        small_data["source"]["pair_probability_per_gate"] = 0.3
        with pytest.raises(ConfigError, match="pair_probability_per_gate"):
            build_scenario(small_data)

    def test_unknown_monitored_output(self, small_data):
        small_data["interferometers"]["signal"]["monitored_output"] = "out3"
        with pytest.raises(ConfigError, match="interferometers.signal"):
            build_scenario(small_data)

    def test_monitored_ports(self, small_data):
        small_data["interferometers"]["signal"]["monitored_output"] = "out2"
        assert build_scenario(small_data).monitored_ports == (1, 0)


class TestContextAndStorage:
    def test_context_properties(self, config_path):
        ctx = AppContext(load_config(str(config_path)))
        assert ctx.workers == 1
        assert ctx.agreement_z == 5.0
        assert ctx.plasmonics["DAMPING"] == 0.5

    def test_explicit_out_dir_has_no_date(self, config_path, tmp_path):
        ctx = AppContext(load_config(str(config_path)))
        backend = ctx.get_artifact_backend(run_name="ignored", out_dir=str(tmp_path))
        assert backend.output_dir == tmp_path
        assert ctx.get_artifact_backend() is backend
        ctx.cleanup()

    def test_date_folder_layout(self, tmp_path):
        backend = LocalArtifactBackend(data_dir=str(tmp_path), run_name="eot_810", date="2025-01-02")
        path = backend.write_csv("a.csv", ("x", "y"), [(1, 2.5)])
        assert path == str(tmp_path / "2025-01-02" / "eot_810" / "a.csv")
        assert (tmp_path / "2025-01-02" / "eot_810" / "a.csv").read_text(encoding="utf-8") == "x,y\n1,2.5\n"
        assert backend.failed == []

    def test_run_date_folder(self):
        assert run_date_folder(date="2025-01-02") == "2025-01-02"
        assert len(run_date_folder("Europe/Paris")) == 10
        with pytest.raises(ConfigError):
            run_date_folder(date="02/01/2025")

    def test_json_has_schema_version(self, tmp_path):
        backend = LocalArtifactBackend(data_dir=str(tmp_path), use_date_folder=False)
        backend.write_json("s.json", {"b": 1, "a": 2})
        text = (tmp_path / "s.json").read_text(encoding="utf-8")
        assert '"schema_version": 1' in text
        assert text.index('"a"') < text.index('"b"')

    def test_run_table_row(self, config_path, small_scenario):
        ctx = AppContext(load_config(str(config_path)))
        row, (reference, sample) = ctx.run_table_row(small_scenario, "analytic")
        assert reference.scenario_name.endswith(":reference")
        assert row.reference.net_visibility == pytest.approx(0.93, abs=1e-9)
        assert row.transmittance.ratio == pytest.approx(1.0, abs=1e-12)
        assert row.passed


class TestReport:
    def test_format_percent(self):
        assert format_percent(0.931, 0.004) == "93.1±0.4%"
        assert format_percent(0.2) == "20.0%"

    def test_format_verdict(self):
        assert format_verdict(True) == "✅"
        assert format_verdict(False) == "❌"
        assert format_verdict(None) == "—"

    def test_table_row_text(self, config_path, small_scenario):
        ctx = AppContext(load_config(str(config_path)))
        row, _ = ctx.run_table_row(small_scenario, "analytic")
        text = render_table_row(row)
        assert "93.0" in text
        assert text.splitlines()[-1] == "结论: ✅ 通过"

    def test_validation_text(self, small_scenario):
        text = render_validation("x", small_scenario.regime_report(), errors=["bad"])
        assert "❌ bad" in text
        assert text.splitlines()[-1] == "结论: ❌ 未通过"
