# coding=utf-8
"""
报告生成模块

提供汇总文本生成和格式化功能，包括：
- 实验汇总（参考可见度、样品可见度、透过率）
- 引擎比较与场景校验报告

模块结构：
- helpers: 报告辅助函数（清理、百分数、判定标记）
- generator: 报告生成器
"""

from fransonbench.report.helpers import (
    clean_label,
    format_percent,
    format_verdict,
)
from fransonbench.report.generator import (
    render_agreement,
    render_table_row,
    render_validation,
)

__all__ = [
    # 辅助函数
    "clean_label",
    "format_percent",
    "format_verdict",
    # 报告生成器
    "render_agreement",
    "render_table_row",
    "render_validation",
]
