# coding=utf-8
"""
fransonbench - 能量-时间纠缠光子 Franson 干涉仿真工具

使用方式:
  python -m fransonbench run --scenario config/scenarios/eot_810.yaml
  fransonbench validate --scenario ...     # 安装后执行
"""

from fransonbench.context import AppContext

__version__ = "1.0.0"
__all__ = ["AppContext", "__version__"]
