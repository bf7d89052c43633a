"""Order-of-magnitude estimators for systematic effects, and the Talbot-time table."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import CODATA2022 as K
from .physics import electron_momentum, electron_speed, free_fall_distance, lorentz_factor, talbot_time

__all__ = [
    "SystematicsReport",
    "TalbotRow",
    "charge_deflection_angle",
    "mirror_charge_shift",
    "backscatter_recoil",
    "talbot_table",
    "systematics_report",
    "TABLE_MASSES_AMU",
]

# nanoparticle masses of recent levitation experiments, in amu
TABLE_MASSES_AMU = (1e6, 2e9, 2e10, 1e11, 7e11)


@dataclass(frozen=True)
class TalbotRow:
    mass: float
    talbot_time: float
    free_fall: float


@dataclass(frozen=True)
class SystematicsReport:
    deflection_angle: float
    mirror_shift: float
    backscatter_velocity: float
    talbot_rows: list[TalbotRow] = field(default_factory=list)


def charge_deflection_angle(E0: float, b: float) -> float:
    """Deflection [rad] of an electron passing a localized elementary charge at impact parameter b."""
    if not b > 0:
        raise ValueError("impact parameter must be positive")
    gamma = lorentz_factor(E0)
    v = electron_speed(E0)
    e = K.elementary_charge
    return e * e / (2 * math.pi * K.vacuum_permittivity * K.electron_mass * gamma * v * v * b)


def mirror_charge_shift(r: float, t: float, M: float) -> float:
    """Displacement after time t of a singly charged particle attracted by its image charge at distance r."""
    if not r > 0:
        raise ValueError("cavity radius must be positive")
    e = K.elementary_charge
    force = e * e / (4 * math.pi * K.vacuum_permittivity * r * r)
    return force * t * t / (2 * M)


def backscatter_recoil(E0: float, M: float) -> float:
    """Upper bound 2 p_e / M on the velocity kick from one backscattered electron."""
    return 2 * electron_momentum(E0) / M


def talbot_table(masses, d: float) -> list[TalbotRow]:
    rows = []
    for M in masses:
        T = talbot_time(M, d)
        rows.append(TalbotRow(M, T, free_fall_distance(T)))
    return rows


def systematics_report(E0: float, M: float, d: float, impact_parameter: float = 1e-9,
                       cavity_radius: float = 2e-3, masses=None) -> SystematicsReport:
    if masses is None:
        masses = [m * K.amu for m in TABLE_MASSES_AMU]
    T_M = talbot_time(M, d)
    return SystematicsReport(
        deflection_angle=charge_deflection_angle(E0, impact_parameter),
        mirror_shift=mirror_charge_shift(cavity_radius, 2 * T_M, M),
        backscatter_velocity=backscatter_recoil(E0, M),
        talbot_rows=talbot_table(masses, d),
    )
