"""Electron kinematics, Gaussian source states and Talbot-scale bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CODATA2022 as K

__all__ = [
    "BeamSpec",
    "GaussianState",
    "electron_wavelength",
    "electron_momentum",
    "lorentz_factor",
    "electron_speed",
    "talbot_time",
    "free_fall_distance",
    "thermal_factor",
    "source_state",
]


@dataclass(frozen=True)
class BeamSpec:
    """Electron probe: kinetic energy E0 [J] and transverse wavenumber width [1/m].

    The incoming transverse wavefunction is ``exp(-width**2 * r**2)``.
    """

    kinetic_energy: float
    transverse_width: float

    def __post_init__(self):
        if not self.kinetic_energy > 0:
            raise ValueError("kinetic_energy must be positive")
        if not self.transverse_width > 0:
            raise ValueError("transverse_width must be positive")

    @classmethod
    def from_spot_hwhm(cls, kinetic_energy: float, hwhm: float) -> "BeamSpec":
        """Build from the half-width-half-maximum of the beam *intensity* profile."""
        if not hwhm > 0:
            raise ValueError("hwhm must be positive")
        return cls(kinetic_energy, math.sqrt(math.log(2) / 2) / hwhm)

    @property
    def spot_hwhm(self) -> float:
        return math.sqrt(math.log(2) / 2) / self.transverse_width

    @property
    def wavelength(self) -> float:
        return electron_wavelength(self.kinetic_energy)


@dataclass(frozen=True)
class GaussianState:
    """Centre-of-mass Gaussian state: mass [kg], position and momentum widths (std. dev.)."""

    mass: float
    sigma_x: float
    sigma_p: float

    def __post_init__(self):
        if not (self.mass > 0 and self.sigma_x > 0 and self.sigma_p > 0):
            raise ValueError("mass, sigma_x and sigma_p must be positive")
        # small slack for roundoff in sigma_x * sigma_p == hbar / 2
        if self.sigma_x * self.sigma_p < 0.5 * K.hbar * (1 - 1e-12):
            raise ValueError("sigma_x * sigma_p violates the uncertainty bound hbar/2")


def _check_energy(E0):
    if not E0 > 0:
        raise ValueError(f"kinetic energy must be positive, got {E0!r}")


def electron_momentum(E0: float) -> float:
    """Relativistic electron momentum [kg m/s] at kinetic energy E0 [J]."""
    _check_energy(E0)
    mc2 = K.electron_rest_energy
    return math.sqrt(E0 * (E0 + 2 * mc2)) / K.light_speed


def electron_wavelength(E0: float) -> float:
    """Relativistic de Broglie wavelength [m] of an electron with kinetic energy E0 [J]."""
    _check_energy(E0)
    mc2 = K.electron_rest_energy
    return K.planck_h * K.light_speed / math.sqrt(E0 * (2 * mc2 + E0))


def lorentz_factor(E0: float) -> float:
    _check_energy(E0)
    return 1 + E0 / K.electron_rest_energy


def electron_speed(E0: float) -> float:
    gamma = lorentz_factor(E0)
    return K.light_speed * math.sqrt(1 - 1 / gamma**2)


def talbot_time(M: float, d: float) -> float:
    """Talbot time M d^2 / h for mass M [kg] and grating period d [m]."""
    if not (M > 0 and d > 0):
        raise ValueError("mass and period must be positive")
    return M * d * d / K.planck_h


def free_fall_distance(T_M: float) -> float:
    """Distance fallen under standard gravity during two Talbot times, 2 g T_M^2."""
    if T_M < 0:
        raise ValueError("time must be non-negative")
    return 2 * K.standard_gravity * T_M * T_M


def thermal_factor(omega: float, temperature: float) -> float:
    """Width scaling sqrt(coth(hbar omega / 2 k_B T)); equals 1 at T = 0."""
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        return 1.0
    theta = K.hbar * omega / (2 * K.boltzmann_k)
    # coth(x) == 1 in double precision for x > 20
    if temperature * 20 < theta:
        return 1.0
    return math.sqrt(1 / math.tanh(theta / temperature))


def source_state(M: float, omega: float, temperature: float = 0.0) -> GaussianState:
    """Thermal Gaussian state of a harmonic trap with angular frequency omega [rad/s].

    Both widths of the oscillator ground state are scaled by the same
    thermal factor, so sigma_x * sigma_p = (hbar / 2) coth(hbar omega / 2 k_B T).
    """
    if not (M > 0 and omega > 0):
        raise ValueError("mass and trap frequency must be positive")
    s = thermal_factor(omega, temperature)
    sigma_x = math.sqrt(K.hbar / (2 * M * omega)) * s
    sigma_p = math.sqrt(K.hbar * M * omega / 2) * s
    return GaussianState(M, sigma_x, sigma_p)
