# coding=utf-8
"""
fransonbench 主程序

能量-时间纠缠光子经等离激元通道的 Franson 干涉仿真
支持: python -m fransonbench {run,spectrum,validate}

退出码:
    0  成功
    1  validate 发现未通过的检查项
    2  配置 / 场景文件错误
    3  Franson 条件不满足，拒绝运行
    4  运行时错误
"""

import argparse
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from fransonbench import __version__
from fransonbench.context import AppContext
from fransonbench.core import load_config
from fransonbench.core.errors import ConfigError, FransonError, RegimeRefusal
from fransonbench.detection import check_window
from fransonbench.plasmonics import (
    HoleArraySpec,
    fabry_perot_period,
    sp_propagation_length,
    transmittance_spectrum,
)
from fransonbench.plasmonics.hole_array import fano_params_for_array
from fransonbench.report import render_agreement, render_table_row, render_validation
from fransonbench.simulation import ENGINE_ANALYTIC, ENGINE_MONTECARLO, ScenarioSpec, load_hole_array

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_REGIME_REFUSAL = 3
EXIT_RUNTIME_ERROR = 4

ENGINE_BOTH = "both"
EXPORT_KINDS = ("fringes", "histogram", "spectrum", "summary", "records")
DEFAULT_EXPORTS = "fringes,histogram,summary"

# run --export spectrum 时围绕工作波长的半宽
SPECTRUM_HALF_SPAN_NM = 150.0

FRINGE_HEADER = ("phase_rad", "coincidences", "gates")
HISTOGRAM_HEADER = ("bin_center_ps", "count")
SPECTRUM_HEADER = ("wavelength_nm", "transmittance")
RECORDS_HEADER = ("gate_index", "dt_ps", "detectorA", "detectorB")


def _parse_exports(value: str) -> Tuple[str, ...]:
    kinds = tuple(k.strip() for k in value.split(",") if k.strip())
    unknown = [k for k in kinds if k not in EXPORT_KINDS]
    if unknown:
        raise argparse.ArgumentTypeError(f"未知导出类型 {', '.join(unknown)}，可选 {', '.join(EXPORT_KINDS)}")
    return kinds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fransonbench",
        description="能量-时间纠缠 Franson 干涉与等离激元通道仿真",
    )
    parser.add_argument("--version", action="version", version=f"fransonbench {__version__}")
    parser.add_argument("--config", default=None, help="应用配置文件（默认 CONFIG_PATH 或 config/config.yaml）")
    sub = parser.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="运行参考 + 样品扫描并输出实验汇总")
    run.add_argument("--scenario", required=True, help="场景文件（YAML 或结果 JSON）")
    run.add_argument(
        "--engine",
        choices=(ENGINE_ANALYTIC, ENGINE_MONTECARLO, ENGINE_BOTH),
        default=ENGINE_MONTECARLO,
    )
    run.add_argument("--seed", type=int, default=None, help="覆盖场景中的 seed")
    run.add_argument("--gates", type=int, default=None, help="覆盖每个相位点的门数")
    run.add_argument("--phases", type=int, default=None, help="改用 [0, 2π) 内等间隔的 N 个相位点")
    run.add_argument("--out", default=None, help="输出目录（不插入日期目录）")
    run.add_argument("--workers", type=int, default=None, help="joblib worker 数（不影响结果）")
    run.add_argument(
        "--export",
        type=_parse_exports,
        default=_parse_exports(DEFAULT_EXPORTS),
        help=f"逗号分隔的导出类型，可选 {','.join(EXPORT_KINDS)}（默认 {DEFAULT_EXPORTS}）",
    )

    spectrum = sub.add_parser("spectrum", help="计算孔阵列透射谱")
    spectrum.add_argument("--array", required=True, help="孔阵列配置文件（YAML）")
    spectrum.add_argument("--lambda-min-nm", type=float, required=True)
    spectrum.add_argument("--lambda-max-nm", type=float, required=True)
    spectrum.add_argument("--step-nm", type=float, default=None, help="波长步长（默认取配置 plasmonics.spectrum_step_nm）")
    spectrum.add_argument("--envelope", action="store_true", help="不叠加衬底 Fabry-Perot 纹波")
    spectrum.add_argument("--out", default=None, help="输出目录（不插入日期目录）")

    validate = sub.add_parser("validate", help="检查场景的 Franson 条件与配置不变量")
    validate.add_argument("--scenario", required=True, help="场景文件（YAML 或结果 JSON）")

    return parser


# === run ===


def _export_spectra(ctx: AppContext, backend, scenario: ScenarioSpec) -> None:
    """为插入孔阵列的通道导出工作波长附近的透射谱"""
    sides = (
        ("signal", scenario.channel_signal, scenario.source.signal_center_nm),
        ("idler", scenario.channel_idler, scenario.source.idler_center_nm),
    )
    for side, channel, center in sides:
        if channel.kind != "hole_array":
            continue
        array: HoleArraySpec = channel.element
        low, high = center - SPECTRUM_HALF_SPAN_NM, center + SPECTRUM_HALF_SPAN_NM
        if not array.permittivity.is_dispersionless:
            table_low, table_high = array.permittivity.range_nm
            low, high = max(low, table_low), min(high, table_high)
        spectrum = _compute_spectrum(ctx, array, low, high, None, include_fabry_perot=True)
        backend.write_csv(f"spectrum_{side}.csv", SPECTRUM_HEADER, spectrum.as_pairs())


def cmd_run(ctx: AppContext, args: argparse.Namespace) -> int:
    scenario = ctx.load_scenario(args.scenario, seed=args.seed, gates_per_point=args.gates, phase_steps=args.phases)
    if args.workers is not None:
        ctx.config["WORKERS"] = args.workers
    exports = set(args.export)

    print(f"[场景] {scenario.name}: {len(scenario.phase_points)} 个相位点 × {scenario.gates_per_point} 门, seed={scenario.seed}")
    t_signal, t_idler = scenario.channel_transmittances()
    print(f"[场景] 通道透过率: signal {t_signal:.4g}, idler {t_idler:.4g}")

    backend = ctx.get_artifact_backend(run_name=scenario.name, out_dir=args.out)
    engines = [ENGINE_ANALYTIC, ENGINE_MONTECARLO] if args.engine == ENGINE_BOTH else [args.engine]

    samples = {}
    for engine in engines:
        print(f"[引擎] {engine} 运行中...")
        keep_records = "records" in exports and engine == ENGINE_MONTECARLO
        row, (scan_ref, scan_sample) = ctx.run_table_row(scenario, engine, keep_records=keep_records)
        samples[engine] = scan_sample
        summary_text = render_table_row(row)
        print(summary_text)
        if scan_sample.provenance_counts:
            sources = ", ".join(f"{name}={count}" for name, count in scan_sample.provenance_counts.items())
            print(f"[诊断] 样品扫描符合来源: {sources}")

        if "fringes" in exports:
            backend.write_csv(f"fringes_{engine}.csv", FRINGE_HEADER, scan_sample.to_rows())
            backend.write_csv(f"fringes_reference_{engine}.csv", FRINGE_HEADER, scan_ref.to_rows())
        if "histogram" in exports and scan_sample.histogram is not None:
            backend.write_csv(f"histogram_{engine}.csv", HISTOGRAM_HEADER, scan_sample.histogram.to_rows())
        if keep_records and scan_sample.records is not None:
            backend.write_csv(f"records_{engine}.csv", RECORDS_HEADER, scan_sample.records.to_rows())
        if "summary" in exports:
            backend.write_json(
                f"summary_{engine}.json",
                {
                    "scenario": scenario.to_dict(),
                    "scenario_hash": scenario.scenario_hash,
                    "result": row.to_dict(),
                    "scans": {"reference": scan_ref.to_dict(), "sample": scan_sample.to_dict()},
                },
            )
            backend.write_text(f"summary_{engine}.txt", summary_text)

    if args.engine == ENGINE_BOTH:
        agreement = ctx.compare_engines(samples[ENGINE_MONTECARLO], samples[ENGINE_ANALYTIC])
        print(render_agreement(agreement))
        if "summary" in exports:
            backend.write_json(
                "agreement.json",
                {"scenario_hash": scenario.scenario_hash, "agreement": agreement.to_dict()},
            )

    if "spectrum" in exports:
        _export_spectra(ctx, backend, scenario)

    written = getattr(backend, "written", [])
    print(f"[存储] {backend.backend_name} 产物目录: {backend.output_dir} ({len(written)} 个文件)")
    return EXIT_RUNTIME_ERROR if backend.failed else EXIT_OK


# === spectrum ===


def _compute_spectrum(
    ctx: AppContext,
    array: HoleArraySpec,
    lambda_min_nm: float,
    lambda_max_nm: float,
    step_nm: Optional[float],
    include_fabry_perot: bool,
):
    step = step_nm if step_nm is not None else float(ctx.plasmonics.get("SPECTRUM_STEP_NM", 0.05))
    if not (step > 0 and lambda_max_nm > lambda_min_nm):
        raise ConfigError(f"波长范围 [{lambda_min_nm:g}, {lambda_max_nm:g}] 或步长 {step:g} 无效")
    n_points = int(round((lambda_max_nm - lambda_min_nm) / step)) + 1
    grid = lambda_min_nm + step * np.arange(n_points)
    fano_params = fano_params_for_array(
        array,
        damping=float(ctx.plasmonics.get("DAMPING", 0.5)),
        tolerance_nm=float(ctx.plasmonics.get("TOLERANCE_NM", 1e-3)),
        max_iterations=int(ctx.plasmonics.get("MAX_ITERATIONS", 100)),
    )
    return transmittance_spectrum(array, grid, fano_params, include_fabry_perot=include_fabry_perot)


def cmd_spectrum(ctx: AppContext, args: argparse.Namespace) -> int:
    array = load_hole_array(args.array)
    spectrum = _compute_spectrum(
        ctx, array, args.lambda_min_nm, args.lambda_max_nm, args.step_nm, include_fabry_perot=not args.envelope
    )

    print(f"[光谱] a={array.period_a_nm:g} nm, d={array.hole_diameter_d_nm:g} nm, {spectrum.wavelengths_nm.size} 个波长点")
    for center in spectrum.resonances_nm:
        line = f"[光谱] 共振 {center:.2f} nm"
        if array.permittivity.contains(center):
            line += f", SP 传播长度 {sp_propagation_length(array, center):.2f} μm"
        print(line)
    middle = 0.5 * (args.lambda_min_nm + args.lambda_max_nm)
    period = fabry_perot_period(middle, array.substrate_index, array.substrate_thickness_mm)
    print(f"[光谱] {middle:.1f} nm 处 Fabry-Perot 周期 {period:.3f} nm")
    for warning in spectrum.warnings:
        print(f"⚠️ {warning}")

    backend = ctx.get_artifact_backend(run_name="spectrum", out_dir=args.out)
    path = backend.write_csv("spectrum.csv", SPECTRUM_HEADER, spectrum.as_pairs())
    if path is None:
        return EXIT_RUNTIME_ERROR
    print(f"[存储] {path}")
    return EXIT_OK


# === validate ===


def cmd_validate(ctx: AppContext, args: argparse.Namespace) -> int:
    scenario = ctx.load_scenario(args.scenario)
    regime = scenario.regime_report()
    warnings: List[str] = check_window(scenario.detection.window, scenario.imbalance_ps)
    warnings += scenario.protocol_warnings()
    errors: List[str] = []

    try:
        scenario.channel_transmittances()
    except FransonError as e:
        errors.append(f"通道透过率无法计算: {e}")

    if scenario.window_fraction <= 0:
        errors.append("时间窗与探测门没有重叠，偶然符合比例为 0")

    print(render_validation(scenario.name, regime, warnings, errors))
    return EXIT_OK if regime.passed and not errors else EXIT_VALIDATION_FAILED


COMMANDS = {
    "run": cmd_run,
    "spectrum": cmd_spectrum,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主程序入口，返回退出码"""
    args = build_parser().parse_args(argv)
    try:
        ctx = AppContext(load_config(args.config))
    except (FileNotFoundError, ConfigError) as e:
        print(f"❌ 配置文件错误: {e}")
        return EXIT_CONFIG_ERROR
    ctx.configure_logging()

    try:
        return COMMANDS[args.cmd](ctx, args)
    except (FileNotFoundError, ConfigError) as e:
        print(f"❌ 配置错误: {e}")
        return EXIT_CONFIG_ERROR
    except RegimeRefusal as e:
        print("❌ Franson 条件不满足，拒绝运行:")
        for line in e.report.format_lines():
            print(f"  {line}")
        return EXIT_REGIME_REFUSAL
    except FransonError as e:
        print(f"❌ 运行错误: {e}")
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        print(f"❌ 程序运行错误: {e}")
        return EXIT_RUNTIME_ERROR
    finally:
        ctx.cleanup()


if __name__ == "__main__":
    sys.exit(main())
