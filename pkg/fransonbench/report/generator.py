# coding=utf-8
"""
报告生成模块

把分析结果渲染成终端 / 文本汇总：
- render_table_row: 一行实验汇总（参考可见度、样品可见度、透过率）
- render_agreement: 两个引擎逐点比较
- render_validation: 场景校验报告
"""

from typing import List, Optional

from fransonbench.analysis.visibility import BELL_VISIBILITY_THRESHOLD, TableRow
from fransonbench.core.franson import RegimeReport
from fransonbench.report.helpers import clean_label, format_percent, format_verdict
from fransonbench.simulation.engine import AgreementReport


def render_table_row(row: TableRow) -> str:
    """
    生成一行实验汇总

    Args:
        row: 参考 / 样品扫描合成的汇总行

    Returns:
        多行文本，末尾不带换行
    """
    reference = row.reference
    sample = row.sample
    check = row.transmittance

    lines = [
        f"实验: {clean_label(row.label)}  (引擎: {row.engine})",
        f"  参考净可见度     {format_percent(reference.net_visibility, reference.net_visibility_sigma)}"
        f"  {format_verdict(row.reference_matches)}",
        f"  样品净可见度     {format_percent(sample.net_visibility, sample.net_visibility_sigma)}"
        f"  {format_verdict(row.sample_matches)}",
        f"  透过率           {format_percent(check.ratio, check.sigma)}"
        f"  {format_verdict(check.compatible)}",
        f"  可见度保持       差值 {format_percent(row.visibility_difference, row.visibility_difference_sigma)}"
        f"  {format_verdict(row.visibility_preserved)}",
    ]

    if row.expected is not None:
        expected = row.expected
        lines.append(
            f"  期望值           参考 {format_percent(expected.reference_visibility)}, "
            f"样品 {format_percent(expected.sample_visibility)}, "
            f"透过率 {format_percent(expected.transmittance)}"
        )

    lines.append(
        f"  噪声底           参考 {reference.noise_floor:.4g}, 样品 {sample.noise_floor:.4g} 计数/点"
    )
    bell = "高于" if sample.net_visibility > BELL_VISIBILITY_THRESHOLD else "不高于"
    lines.append(f"  样品净可见度{bell} 1/√2 ≈ {format_percent(BELL_VISIBILITY_THRESHOLD)}")

    if row.clipped:
        lines.append("  ⚠️ 净可见度触及上限 1，已截断")
    warnings = reference.warnings + sample.warnings
    for warning in dict.fromkeys(warnings):
        lines.append(f"  ⚠️ {warning}")

    lines.append(f"结论: {'✅ 通过' if row.passed else '❌ 未通过'}")
    return "\n".join(lines)


def render_agreement(report: AgreementReport) -> str:
    """生成引擎比较摘要"""
    z_text = ", ".join(f"{z:+.2f}" for z in report.z_scores)
    status = "✅ 一致" if report.passed else "❌ 不一致"
    return "\n".join(
        [
            f"引擎比较: {status} (max|z| = {report.max_abs_z:.2f}, 阈值 {report.threshold:g})",
            f"  逐点 z: {z_text}",
        ]
    )


def render_validation(
    name: str,
    regime: RegimeReport,
    warnings: Optional[List[str]] = None,
    errors: Optional[List[str]] = None,
) -> str:
    """
    生成场景校验报告

    Args:
        name: 场景名
        regime: Franson 条件检查结果
        warnings: 不影响结论的警告（时间窗、流程）
        errors: 导致失败的问题（如透过率无法计算）

    Returns:
        多行文本，最后一行为结论
    """
    errors = errors or []
    lines = [f"场景校验: {clean_label(name)}"]
    lines.extend(f"  {line}" for line in regime.format_lines())
    for error in errors:
        lines.append(f"  ❌ {error}")
    for warning in warnings or []:
        lines.append(f"  ⚠️ {warning}")
    passed = regime.passed and not errors
    lines.append(f"结论: {'✅ 通过' if passed else '❌ 未通过'}")
    return "\n".join(lines)
