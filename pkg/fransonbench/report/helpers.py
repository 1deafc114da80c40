# coding=utf-8
"""
报告辅助函数模块

提供汇总文本生成相关的通用格式化函数
"""

import re
from typing import Optional


def clean_label(label: str) -> str:
    """清理标签中的换行和多余空白

    清理规则：
    - 将换行符(\\n, \\r)替换为空格
    - 将多个连续空白字符合并为单个空格
    - 去除首尾空白

    Args:
        label: 原始标签（场景名或汇总行标签）

    Returns:
        清理后的标签字符串
    """
    if not isinstance(label, str):
        label = str(label)
    cleaned = label.replace("\n", " ").replace("\r", " ")
    cleaned = re.sub(r"\s+", " ", cleaned)
    return cleaned.strip()


def format_percent(value: float, sigma: Optional[float] = None, digits: int = 1) -> str:
    """格式化百分数，可附带不确定度

    Args:
        value: 比例值（0.931 → 93.1%）
        sigma: 不确定度（同单位），None 时不显示
        digits: 小数位数

    Returns:
        如 "93.1±0.4%" 或 "11.0%"

    Examples:
        >>> format_percent(0.931, 0.004)
        '93.1±0.4%'
    """
    if sigma is None:
        return f"{value * 100:.{digits}f}%"
    return f"{value * 100:.{digits}f}±{sigma * 100:.{digits}f}%"


def format_verdict(verdict: Optional[bool]) -> str:
    """判定标记：通过 ✅ / 不通过 ❌ / 未配置期望值 —"""
    if verdict is None:
        return "—"
    return "✅" if verdict else "❌"
