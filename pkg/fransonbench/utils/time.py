# coding=utf-8
"""
运行日期目录

产物按配置时区的运行日期分目录，文件内容本身不含时间。
"""

import re
from datetime import datetime, tzinfo
from typing import Optional

import pytz

from fransonbench.core.errors import ConfigError

DEFAULT_TIMEZONE = "Asia/Shanghai"

_DATE_FOLDER = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def resolve_timezone(name: str) -> tzinfo:
    """
    解析时区名称

    Raises:
        ConfigError: 未知时区（指向 app.timezone）
    """
    try:
        return pytz.timezone(name)
    except pytz.UnknownTimeZoneError as e:
        raise ConfigError(f"未知时区 {name!r}", "app.timezone") from e


def run_date_folder(timezone: str = DEFAULT_TIMEZONE, date: Optional[str] = None) -> str:
    """
    运行日期目录名 (YYYY-MM-DD)

    Args:
        timezone: 时区名称
        date: 固定日期（测试或补跑），None 时取该时区的今天

    Raises:
        ConfigError: 时区未知或 date 不是 YYYY-MM-DD
    """
    if date is not None:
        if not _DATE_FOLDER.match(date):
            raise ConfigError(f"日期目录应为 YYYY-MM-DD，当前 {date!r}")
        return date
    return datetime.now(resolve_timezone(timezone)).strftime("%Y-%m-%d")
