# coding=utf-8
"""
LR-SPP 金条波导

金条嵌在对称介质包层中，端到端损耗 = 传播损耗 × 长度 + 两个端面耦合损耗。
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict

from fransonbench.core.errors import DomainError


def db_to_ratio(loss_db: float) -> float:
    """损耗 dB → 透过率"""
    return 10.0 ** (-loss_db / 10.0)


@dataclass(frozen=True)
class LrsppWaveguideSpec:
    stripe_length_cm: float
    stripe_width_um: float
    stripe_thickness_nm: float
    cladding_index: float
    propagation_loss_db_per_cm: float
    coupling_loss_per_facet_db: float

    def __post_init__(self):
        for name in ("stripe_length_cm", "stripe_width_um", "stripe_thickness_nm", "cladding_index"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} 必须为正，当前 {getattr(self, name)!r}")
        if self.propagation_loss_db_per_cm < 0 or self.coupling_loss_per_facet_db < 0:
            raise DomainError("损耗不能为负（透过率必须在 (0, 1] 内）")

    @property
    def total_loss_db(self) -> float:
        return self.propagation_loss_db_per_cm * self.stripe_length_cm + 2.0 * self.coupling_loss_per_facet_db

    @property
    def transmittance(self) -> float:
        return db_to_ratio(self.total_loss_db)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
