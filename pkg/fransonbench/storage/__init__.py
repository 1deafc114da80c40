# coding=utf-8
"""
存储模块 - 产物写出后端

支持的存储后端:
- local: 本地文件（可选日期目录）
"""

from fransonbench.storage.base import (
    ARTIFACT_SCHEMA_VERSION,
    ArtifactBackend,
    format_csv,
    format_json,
)
from fransonbench.storage.local import LocalArtifactBackend

__all__ = [
    "ARTIFACT_SCHEMA_VERSION",
    "ArtifactBackend",
    "format_csv",
    "format_json",
    "LocalArtifactBackend",
]
