# coding=utf-8
"""
工具模块 - 运行日期目录
"""

from fransonbench.utils.time import DEFAULT_TIMEZONE, resolve_timezone, run_date_folder

__all__ = [
    "DEFAULT_TIMEZONE",
    "resolve_timezone",
    "run_date_folder",
]
