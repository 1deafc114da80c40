# coding=utf-8
"""
应用上下文模块

AppContext 把应用配置、场景加载、引擎调度和产物后端串在一起，CLI 只和它打交道。
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from fransonbench.analysis import FLOOR_ANALYTIC, TableRow, build_table_row
from fransonbench.simulation import (
    DEFAULT_CHUNK_GATES,
    ENGINE_MONTECARLO,
    AgreementReport,
    FringeScan,
    ScenarioSpec,
    agreement_report,
    load_scenario,
    run_engine,
)
from fransonbench.storage import ArtifactBackend, LocalArtifactBackend
from fransonbench.utils.time import DEFAULT_TIMEZONE


class AppContext:
    """
    应用上下文类

    持有 load_config 的结果；worker 数、分块大小、噪声底来源等都从这里读取。

    使用示例:
        config = load_config()
        ctx = AppContext(config)

        scenario = ctx.load_scenario("config/scenarios/eot_810.yaml", seed=7)
        row, scans = ctx.run_table_row(scenario, "montecarlo")

        backend = ctx.get_artifact_backend(run_name=scenario.name)
        backend.write_json("summary.json", row.to_dict())
    """

    def __init__(self, config: Dict[str, Any]):
        """
        初始化应用上下文

        Args:
            config: load_config 返回的完整配置字典
        """
        self.config = config
        self._artifact_backend: Optional[ArtifactBackend] = None

    # === 配置访问 ===

    @property
    def timezone(self) -> str:
        """获取配置的时区"""
        return self.config.get("TIMEZONE", DEFAULT_TIMEZONE)

    @property
    def log_level(self) -> str:
        return self.config.get("LOG_LEVEL", "WARNING")

    @property
    def workers(self) -> int:
        """joblib worker 数"""
        return int(self.config.get("WORKERS", 1))

    @property
    def chunk_gates(self) -> int:
        return int(self.config.get("CHUNK_GATES", DEFAULT_CHUNK_GATES))

    @property
    def noise_floor_source(self) -> str:
        return self.config.get("NOISE_FLOOR_SOURCE", FLOOR_ANALYTIC)

    @property
    def agreement_z(self) -> float:
        return float(self.config.get("AGREEMENT_Z", 5.0))

    @property
    def plasmonics(self) -> Dict[str, Any]:
        """等离激元求解参数（DAMPING / TOLERANCE_NM / MAX_ITERATIONS / SPECTRUM_STEP_NM）"""
        return self.config.get("PLASMONICS", {})

    # === 日志 ===

    def configure_logging(self) -> None:
        """按配置的日志级别初始化根日志器"""
        level = getattr(logging, self.log_level, logging.WARNING)
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    # === 存储操作 ===

    def get_artifact_backend(self, run_name: str = "", out_dir: Optional[str] = None) -> ArtifactBackend:
        """
        获取产物存储后端（延迟初始化，单例）

        Args:
            run_name: 运行子目录名，out_dir 给出时忽略
            out_dir: 显式输出目录，给出时不插入日期目录（同一命令重跑产物逐字节相同）
        """
        if self._artifact_backend is None:
            if out_dir:
                self._artifact_backend = LocalArtifactBackend(
                    data_dir=out_dir,
                    use_date_folder=False,
                    timezone=self.timezone,
                )
            else:
                self._artifact_backend = LocalArtifactBackend(
                    data_dir=self.config.get("DATA_DIR", "output"),
                    run_name=run_name,
                    use_date_folder=self.config.get("USE_DATE_FOLDER", True),
                    timezone=self.timezone,
                )
        return self._artifact_backend

    # === 场景与引擎 ===

    @staticmethod
    def load_scenario(
        path: Union[str, Path],
        seed: Optional[int] = None,
        gates_per_point: Optional[int] = None,
        phase_steps: Optional[int] = None,
    ) -> ScenarioSpec:
        """加载场景并应用命令行覆盖项"""
        return load_scenario(path).with_overrides(
            seed=seed, gates_per_point=gates_per_point, phase_steps=phase_steps
        )

    def run_engine(self, scenario: ScenarioSpec, engine: str, keep_records: bool = False) -> FringeScan:
        """按名称运行引擎，Monte-Carlo 使用配置的 worker 数与分块"""
        if engine == ENGINE_MONTECARLO:
            return run_engine(
                scenario,
                engine,
                workers=self.workers,
                chunk_gates=self.chunk_gates,
                keep_records=keep_records,
            )
        return run_engine(scenario, engine)

    def run_table_row(
        self, scenario: ScenarioSpec, engine: str, keep_records: bool = False
    ) -> Tuple[TableRow, Tuple[FringeScan, FringeScan]]:
        """
        参考扫描 + 样品扫描 → 汇总行

        Returns:
            (汇总行, (参考扫描, 样品扫描))
        """
        scan_ref = self.run_engine(scenario.reference(), engine)
        scan_sample = self.run_engine(scenario, engine, keep_records=keep_records)
        floor_source = self.noise_floor_source if engine == ENGINE_MONTECARLO else FLOOR_ANALYTIC
        row = build_table_row(scenario, scan_ref, scan_sample, floor_source)
        return row, (scan_ref, scan_sample)

    def compare_engines(self, montecarlo: FringeScan, analytic: FringeScan) -> AgreementReport:
        return agreement_report(montecarlo, analytic, self.agreement_z)

    def cleanup(self):
        """清理资源"""
        if self._artifact_backend:
            self._artifact_backend.cleanup()
            self._artifact_backend = None
