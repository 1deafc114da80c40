# coding=utf-8
"""
产物存储后端抽象基类

定义统一的产物写出接口，所有后端都需要实现这些方法。
产物格式固定，便于重复运行逐字节比较：
- CSV: 单行表头，'\n' 换行，浮点数用 repr 保证往返精度
- JSON: 键排序，缩进 2，带 schema_version，不含时间戳
"""

import json
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

ARTIFACT_SCHEMA_VERSION = 1


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    生成 CSV 文本

    Examples:
        >>> format_csv(["phase_rad", "coincidences", "gates"], [(0.0, 12, 100)])
        'phase_rad,coincidences,gates\\n0.0,12,100\\n'
    """
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(value) for value in row))
    return "\n".join(lines) + "\n"


def _json_default(value: Any) -> Any:
    # numpy 标量与数组
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"无法序列化类型 {type(value).__name__}")


def format_json(payload: Dict[str, Any]) -> str:
    """生成 JSON 文本（自动补 schema_version）"""
    data = dict(payload)
    data.setdefault("schema_version", ARTIFACT_SCHEMA_VERSION)
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, default=_json_default) + "\n"


class ArtifactBackend(ABC):
    """
    产物存储后端抽象基类

    所有后端都需要实现:
    - 写出 CSV / JSON / 文本产物
    - 清理资源
    """

    @abstractmethod
    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Optional[str]:
        """
        写出 CSV 产物

        Args:
            name: 文件名（如 fringes_sample.csv）
            header: 表头
            rows: 数据行

        Returns:
            写出的文件路径，失败返回 None
        """
        pass

    @abstractmethod
    def write_json(self, name: str, payload: Dict[str, Any]) -> Optional[str]:
        """
        写出 JSON 产物

        Args:
            name: 文件名
            payload: 内容字典

        Returns:
            写出的文件路径，失败返回 None
        """
        pass

    @abstractmethod
    def write_text(self, name: str, content: str) -> Optional[str]:
        """
        写出纯文本产物（如汇总表）
        """
        pass

    @abstractmethod
    def cleanup(self) -> None:
        """
        清理资源
        """
        pass

    @property
    @abstractmethod
    def backend_name(self) -> str:
        """
        存储后端名称
        """
        pass

    @property
    @abstractmethod
    def output_dir(self) -> Path:
        """
        本次运行的产物目录
        """
        pass

    @property
    def failed(self) -> List[str]:
        """
        写出失败的文件名，默认后端不记录
        """
        return []
