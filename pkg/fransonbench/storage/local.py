# coding=utf-8
"""
本地产物存储后端

产物按 data_dir/[YYYY-MM-DD/]run_name/ 组织，日期按配置时区计算。
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from fransonbench.storage.base import ArtifactBackend, format_csv, format_json
from fransonbench.utils.time import DEFAULT_TIMEZONE, run_date_folder


class LocalArtifactBackend(ArtifactBackend):
    """
    本地文件后端

    写出的每个文件路径都记录在 written 中，便于 CLI 汇总打印。
    """

    def __init__(
        self,
        data_dir: str = "output",
        run_name: str = "",
        use_date_folder: bool = True,
        timezone: str = DEFAULT_TIMEZONE,
        date: Optional[str] = None,
    ):
        """
        初始化本地后端

        Args:
            data_dir: 数据根目录
            run_name: 运行子目录名（通常为场景名），为空时直接写入日期目录
            use_date_folder: 是否插入 YYYY-MM-DD 日期目录
            timezone: 时区配置
            date: 指定日期（测试用），None 时取当前日期
        """
        self.data_dir = Path(data_dir)
        self.run_name = run_name
        self.use_date_folder = use_date_folder
        self.timezone = timezone
        self.date = date
        self.written: List[str] = []
        self._failed: List[str] = []

    @property
    def failed(self) -> List[str]:
        return list(self._failed)

    @property
    def backend_name(self) -> str:
        return "local"

    @property
    def output_dir(self) -> Path:
        base = self.data_dir
        if self.use_date_folder:
            base = base / run_date_folder(self.timezone, self.date)
        if self.run_name:
            base = base / self.run_name
        return base

    def _write(self, name: str, content: str) -> Optional[str]:
        try:
            target_dir = self.output_dir
            target_dir.mkdir(parents=True, exist_ok=True)
            file_path = target_dir / name
            with open(file_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(content)
            self.written.append(str(file_path))
            return str(file_path)
        except OSError as e:
            print(f"[存储] 写出 {name} 失败: {e}")
            self._failed.append(name)
            return None

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Optional[str]:
        return self._write(name, format_csv(header, rows))

    def write_json(self, name: str, payload: Dict[str, Any]) -> Optional[str]:
        return self._write(name, format_json(payload))

    def write_text(self, name: str, content: str) -> Optional[str]:
        return self._write(name, content if content.endswith("\n") else content + "\n")

    def cleanup(self) -> None:
        """本地后端无需释放资源，只清空写出记录"""
        self.written.clear()
        self._failed.clear()
