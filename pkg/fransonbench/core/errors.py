# coding=utf-8
"""
异常定义模块

所有模块共用的异常类型。CLI 根据异常类型映射退出码。
"""

from typing import Any, Optional


class FransonError(Exception):
    """项目异常基类"""


class DomainError(FransonError, ValueError):
    """参数超出定义域或违反不变量"""


class OutOfRangeError(DomainError):
    """波长超出介电常数表范围，或共振阶次找不到不动点"""


class FitError(DomainError):
    """条纹拟合失败（设计矩阵秩亏等）"""


class DegenerateSignalError(DomainError):
    """偏置不高于噪声底，无法计算净可见度"""


class ConfigError(FransonError, ValueError):
    """
    配置/场景文件错误

    Args:
        message: 错误描述
        path: 出错字段的点分路径，如 channels.signal.hole_array.period_a_nm
        line: YAML 行号（从 1 开始），未知时为 None
    """

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if line is not None:
            location += f"第 {line} 行"
        if path:
            location += f"{' ' if location else ''}字段 {path}"
        super().__init__(f"{location}: {message}" if location else message)


class RegimeRefusal(FransonError, RuntimeError):
    """Franson 条件检查未通过，拒绝运行"""

    def __init__(self, report: Any):
        self.report = report
        failed = ", ".join(report.failed_flags()) if report is not None else ""
        super().__init__(f"Franson 条件检查未通过: {failed}")
