# coding=utf-8
"""
金属介电常数表

文件格式（纯文本）：
- 每行两列：波长 (nm) 与复介电常数 "re,im"，以空白分隔
- '#' 之后为注释，空行忽略

示例:
    # wavelength_nm  epsilon
    810   -24.9,1.6
    1550  -115.0,11.6
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from fransonbench.core.errors import ConfigError, DomainError, OutOfRangeError


def parse_complex(text: str) -> complex:
    """解析 "re,im" 形式的复数"""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ValueError(f"复数格式应为 're,im'，当前为 {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def format_complex(value: complex) -> str:
    return f"{value.real!r},{value.imag!r}"


@dataclass(frozen=True)
class PermittivityTable:
    """
    ε_m(λ) 查表，实部虚部分别线性插值

    只有一行时视为无色散（任意波长取同一值）。
    """

    wavelengths_nm: Tuple[float, ...]
    values: Tuple[complex, ...]
    source: str = ""

    def __post_init__(self):
        if not self.wavelengths_nm:
            raise DomainError("介电常数表为空")
        if len(self.wavelengths_nm) != len(self.values):
            raise DomainError("介电常数表波长与数值长度不一致")
        if any(b <= a for a, b in zip(self.wavelengths_nm, self.wavelengths_nm[1:])):
            raise DomainError("介电常数表波长必须严格递增")

    @classmethod
    def fixed(cls, value: complex) -> "PermittivityTable":
        """无色散常数表"""
        return cls((0.0,), (complex(value),), source="fixed")

    @property
    def is_dispersionless(self) -> bool:
        return len(self.values) == 1

    @property
    def range_nm(self) -> Tuple[float, float]:
        if self.is_dispersionless:
            return 0.0, math.inf
        return self.wavelengths_nm[0], self.wavelengths_nm[-1]

    def contains(self, wavelength_nm: float) -> bool:
        low, high = self.range_nm
        return low <= wavelength_nm <= high

    def __call__(self, wavelength_nm: float) -> complex:
        """
        查询 ε_m(λ)

        Raises:
            OutOfRangeError: 波长超出表范围
        """
        if self.is_dispersionless:
            return self.values[0]
        if not self.contains(wavelength_nm):
            low, high = self.range_nm
            raise OutOfRangeError(
                f"波长 {wavelength_nm:.3f} nm 超出介电常数表范围 [{low:g}, {high:g}] nm"
            )
        grid = np.asarray(self.wavelengths_nm)
        values = np.asarray(self.values)
        re = np.interp(wavelength_nm, grid, values.real)
        im = np.interp(wavelength_nm, grid, values.imag)
        return complex(re, im)

    def to_dict(self) -> Dict[str, Any]:
        if self.is_dispersionless:
            return {"fixed": format_complex(self.values[0])}
        return {
            "table": [[wl, format_complex(v)] for wl, v in zip(self.wavelengths_nm, self.values)],
            "source": self.source,
        }


def load_permittivity_table(path: Union[str, Path]) -> PermittivityTable:
    """
    从文本文件加载介电常数表

    Raises:
        FileNotFoundError: 文件不存在
        ConfigError: 行格式错误（带行号）
    """
    table_path = Path(path)
    if not table_path.exists():
        raise FileNotFoundError(f"介电常数表 {table_path} 不存在")

    rows: List[Tuple[float, complex]] = []
    with open(table_path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ConfigError(f"应为两列（波长 与 re,im），实际 {len(fields)} 列", str(table_path), line_no)
            try:
                rows.append((float(fields[0]), parse_complex(fields[1])))
            except ValueError as e:
                raise ConfigError(str(e), str(table_path), line_no) from e

    rows.sort(key=lambda row: row[0])
    try:
        return PermittivityTable(
            tuple(wl for wl, _ in rows),
            tuple(v for _, v in rows),
            source=table_path.name,
        )
    except DomainError as e:
        raise ConfigError(str(e), str(table_path)) from e

