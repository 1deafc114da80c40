# coding=utf-8
"""
配置工具模块 - 场景文件解析和字段校验

提供带行号的 YAML 加载和按点分路径读取字段的工具，
字段缺失或类型错误时抛出带路径和行号的 ConfigError。
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from fransonbench.core.errors import ConfigError

LineMap = Dict[str, int]


def _collect_lines(node: yaml.Node, prefix: str, lines: LineMap) -> None:
    """遍历 YAML 节点树，记录每个点分路径所在行（从 1 开始）"""
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[path] = key_node.start_mark.line + 1
            _collect_lines(value_node, path, lines)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            path = f"{prefix}[{index}]"
            lines[path] = item.start_mark.line + 1
            _collect_lines(item, path, lines)


def load_yaml_with_lines(path: Union[str, Path]) -> Tuple[Dict[str, Any], LineMap]:
    """
    加载 YAML 文件并记录字段行号

    Args:
        path: YAML 文件路径

    Returns:
        (数据字典, 点分路径 → 行号)

    Raises:
        FileNotFoundError: 文件不存在
        ConfigError: YAML 语法错误（带行号），或顶层不是映射
    """
    yaml_path = Path(path)
    if not yaml_path.exists():
        raise FileNotFoundError(f"场景文件 {yaml_path} 不存在")

    text = yaml_path.read_text(encoding="utf-8")
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise ConfigError(f"YAML 解析失败: {e.problem}", str(yaml_path), line) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML 解析失败: {e}", str(yaml_path)) from e

    if not isinstance(data, dict):
        raise ConfigError("场景文件顶层必须是键值映射", str(yaml_path), 1)

    lines: LineMap = {}
    if node is not None:
        _collect_lines(node, "", lines)
    return data, lines


class FieldReader:
    """
    按点分路径读取配置字段

    Examples:
        >>> reader = FieldReader({"source": {"signal_center_nm": 810}})
        >>> reader.section("source").number("signal_center_nm")
        810.0
        >>> reader.section("source").number("idler_center_nm")
        Traceback (most recent call last):
        ...
        fransonbench.core.errors.ConfigError: 字段 source.idler_center_nm: 缺少必填字段
    """

    _MISSING = object()

    def __init__(self, data: Dict[str, Any], lines: Optional[LineMap] = None, prefix: str = ""):
        self.data = data if data is not None else {}
        self.lines = lines or {}
        self.prefix = prefix

    def path_of(self, key: str = "") -> str:
        if not key:
            return self.prefix
        return f"{self.prefix}.{key}" if self.prefix else key

    def line_of(self, key: str = "") -> Optional[int]:
        return self.lines.get(self.path_of(key))

    def error(self, message: str, key: str = "") -> ConfigError:
        """构造指向某个字段的 ConfigError"""
        return ConfigError(message, self.path_of(key), self.line_of(key))

    def has(self, key: str) -> bool:
        return key in self.data and self.data[key] is not None

    def keys(self) -> List[str]:
        return list(self.data.keys())

    def raw(self, key: str, default: Any = _MISSING) -> Any:
        if key not in self.data or self.data[key] is None:
            if default is self._MISSING:
                raise self.error("缺少必填字段", key)
            return default
        return self.data[key]

    def section(self, key: str, required: bool = True) -> "FieldReader":
        """读取子映射"""
        value = self.raw(key, None if not required else self._MISSING)
        if value is None:
            value = {}
        if not isinstance(value, dict):
            raise self.error(f"应为键值映射，实际为 {type(value).__name__}", key)
        return FieldReader(value, self.lines, self.path_of(key))

    def number(self, key: str, default: Any = _MISSING) -> float:
        """读取有限实数"""
        value = self.raw(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(f"应为数值，实际为 {value!r}", key)
        if not math.isfinite(value):
            raise self.error(f"应为有限数值，实际为 {value!r}", key)
        return float(value)

    def optional_number(self, key: str) -> Optional[float]:
        return self.number(key) if self.has(key) else None

    def integer(self, key: str, default: Any = _MISSING) -> int:
        value = self.raw(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(f"应为整数，实际为 {value!r}", key)
        return value

    def string(self, key: str, default: Any = _MISSING, choices: Optional[Tuple[str, ...]] = None) -> str:
        value = self.raw(key, default)
        if not isinstance(value, str):
            raise self.error(f"应为字符串，实际为 {value!r}", key)
        if choices is not None and value not in choices:
            raise self.error(f"取值 {value!r} 无效，可选 {', '.join(choices)}", key)
        return value

    def number_list(self, key: str, default: Any = _MISSING) -> List[float]:
        value = self.raw(key, default)
        if not isinstance(value, (list, tuple)):
            raise self.error(f"应为数值列表，实际为 {value!r}", key)
        result = []
        for index, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)) or not math.isfinite(item):
                raise self.error(f"第 {index} 项应为有限数值，实际为 {item!r}", key)
            result.append(float(item))
        return result

    def items(self, key: str) -> List["FieldReader"]:
        """读取映射列表"""
        value = self.raw(key, [])
        if not isinstance(value, list):
            raise self.error(f"应为列表，实际为 {type(value).__name__}", key)
        readers = []
        for index, item in enumerate(value):
            path = f"{self.path_of(key)}[{index}]"
            if not isinstance(item, dict):
                raise ConfigError(f"应为键值映射，实际为 {item!r}", path, self.lines.get(path))
            readers.append(FieldReader(item, self.lines, path))
        return readers
