# coding=utf-8
"""
等离激元通道模块

- permittivity: 金属介电常数表
- hole_array: 亚波长孔阵列共振与透射谱
- waveguide: LR-SPP 金条波导
- channel: 通道透过率与级联
"""

from fransonbench.plasmonics.channel import (
    CHANNEL_KINDS,
    ChannelSpec,
    cascade_transmittance,
    channel_loss_db,
    channel_transmittance,
    ratio_to_db,
)
from fransonbench.plasmonics.hole_array import (
    FanoParams,
    HoleArraySpec,
    LinewidthModel,
    ResonanceSpec,
    Spectrum,
    fabry_perot_period,
    solve_resonance,
    sp_propagation_length,
    sp_resonance_wavelengths,
    transmittance_at,
    transmittance_spectrum,
)
from fransonbench.plasmonics.permittivity import (
    PermittivityTable,
    load_permittivity_table,
)
from fransonbench.plasmonics.waveguide import LrsppWaveguideSpec, db_to_ratio

__all__ = [
    "CHANNEL_KINDS",
    "ChannelSpec",
    "cascade_transmittance",
    "channel_loss_db",
    "channel_transmittance",
    "ratio_to_db",
    "FanoParams",
    "HoleArraySpec",
    "LinewidthModel",
    "ResonanceSpec",
    "Spectrum",
    "fabry_perot_period",
    "solve_resonance",
    "sp_propagation_length",
    "sp_resonance_wavelengths",
    "transmittance_at",
    "transmittance_spectrum",
    "PermittivityTable",
    "load_permittivity_table",
    "LrsppWaveguideSpec",
    "db_to_ratio",
]
