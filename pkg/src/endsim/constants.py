"""
Physical constants and unit conversions
---------------------------------------

All values are SI and taken from the CODATA 2022 recommended values
(the exact SI-defining constants h, e, c, k_B are exact by definition).
They are hard-coded rather than read from ``scipy.constants`` so that
regression numbers do not drift when scipy updates its CODATA table.

The ``SNAPSHOT_HASH`` string identifies this table and is written into
every output file header.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass

__all__ = [
    "Constants",
    "CODATA2022",
    "SNAPSHOT_HASH",
    "UNITS",
    "to_si",
    "from_si",
]


@dataclass(frozen=True)
class Constants:
    revision: str
    planck_h: float  # J s
    elementary_charge: float  # C
    light_speed: float  # m / s
    boltzmann_k: float  # J / K
    electron_mass: float  # kg
    vacuum_permittivity: float  # F / m
    bohr_radius: float  # m
    amu: float  # kg
    standard_gravity: float  # m / s^2

    @property
    def hbar(self) -> float:
        return self.planck_h / (2 * math.pi)

    @property
    def electron_rest_energy(self) -> float:
        return self.electron_mass * self.light_speed**2

    def digest(self) -> str:
        text = ";".join(f"{k}={v!r}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


CODATA2022 = Constants(
    revision="CODATA 2022",
    planck_h=6.62607015e-34,
    elementary_charge=1.602176634e-19,
    light_speed=299792458.0,
    boltzmann_k=1.380649e-23,
    electron_mass=9.1093837139e-31,
    vacuum_permittivity=8.8541878188e-12,
    bohr_radius=5.29177210544e-11,
    amu=1.66053906892e-27,
    standard_gravity=9.80665,
)

SNAPSHOT_HASH = CODATA2022.digest()

# convenience units accepted at the I/O boundary, as SI multipliers
UNITS: dict[str, float] = {
    # length
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "nm": 1e-9,
    "pm": 1e-12,
    "A": 1e-10,
    # time
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
    # mass
    "kg": 1.0,
    "amu": CODATA2022.amu,
    # energy
    "J": 1.0,
    "eV": CODATA2022.elementary_charge,
    "keV": 1e3 * CODATA2022.elementary_charge,
    "MeV": 1e6 * CODATA2022.elementary_charge,
    # frequency (cycles, not angular)
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    # temperature
    "K": 1.0,
    "mK": 1e-3,
    "uK": 1e-6,
    "nK": 1e-9,
    # wavenumber
    "1/m": 1.0,
    "1/nm": 1e9,
    # dimensionless and angles
    "1": 1.0,
    "rad": 1.0,
    "mrad": 1e-3,
    "urad": 1e-6,
}


def to_si(value: float, unit: str) -> float:
    try:
        return value * UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown unit {unit!r}") from None


def from_si(value: float, unit: str) -> float:
    try:
        return value / UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown unit {unit!r}") from None
