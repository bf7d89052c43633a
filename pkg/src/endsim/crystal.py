"""
Diamond-cubic nanocrystal: reciprocal lattice, structure factors, Wentzel
scattering amplitudes and the form factors of an oblate spheroidal particle.

Miller indices are always in the primitive (fcc) cell representation;
use :func:`to_conventional` to get the conventional cubic-cell indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import CODATA2022 as K
from .physics import BeamSpec, electron_wavelength, lorentz_factor
from .special import j1_over_x

__all__ = [
    "CrystalSpec",
    "MillerIndex",
    "SILICON",
    "reciprocal_vector",
    "d_spacing",
    "structure_factor",
    "is_forbidden",
    "to_conventional",
    "screening_length",
    "wentzel_amplitude",
    "order_amplitudes",
    "projected_density",
    "cell_density_fourier",
    "mass_density_fourier",
]


class MillerIndex(NamedTuple):
    h: int
    k: int
    l: int  # noqa: E741

    def __mul__(self, n):  # n * (h, k, l), not tuple repetition
        return MillerIndex(n * self.h, n * self.k, n * self.l)

    __rmul__ = __mul__

    def __neg__(self):
        return MillerIndex(-self.h, -self.k, -self.l)

    @property
    def is_zero(self) -> bool:
        return self.h == 0 and self.k == 0 and self.l == 0


@dataclass(frozen=True)
class CrystalSpec:
    """Oblate spheroidal diamond-cubic crystal.

    ``radius`` is the equatorial radius R_M and ``half_thickness`` the
    polar semi-axis b_M (along the beam). The number of primitive cells is
    derived from the volume: four per conventional cubic cell.
    """

    lattice_constant: float = 543e-12
    atomic_number: int = 14
    radius: float = 109e-9
    half_thickness: float = 30e-9

    def __post_init__(self):
        if not self.lattice_constant > 0:
            raise ValueError("lattice_constant must be positive")
        if not (int(self.atomic_number) == self.atomic_number and self.atomic_number > 0):
            raise ValueError("atomic_number must be a positive integer")
        if not (self.half_thickness > 0 and self.radius >= self.half_thickness):
            raise ValueError("need radius >= half_thickness > 0 (oblate spheroid)")

    @property
    def volume(self) -> float:
        return 4 * math.pi * self.half_thickness * self.radius**2 / 3

    @property
    def cell_count(self) -> float:
        return 4 * self.volume / self.lattice_constant**3

    @property
    def cell_density(self) -> float:
        """Primitive cells per unit volume."""
        return self.cell_count / self.volume


SILICON = CrystalSpec()


def _as_index(idx) -> MillerIndex:
    return idx if isinstance(idx, MillerIndex) else MillerIndex(*map(int, idx))


def reciprocal_vector(idx, a: float) -> np.ndarray:
    """Reciprocal lattice vector [1/m] of primitive indices ``idx`` for lattice constant ``a``."""
    h, k, l = _as_index(idx)  # noqa: E741
    return (2 * np.pi / a) * np.array([-h + k + l, h - k + l, h + k - l], dtype=float)


def to_conventional(idx) -> MillerIndex:
    """Conventional cubic-cell indices (HKL) of a primitive-cell reflection."""
    h, k, l = _as_index(idx)  # noqa: E741
    return MillerIndex(-h + k + l, h - k + l, h + k - l)


def d_spacing(idx, a: float) -> float:
    idx = _as_index(idx)
    if idx.is_zero:
        raise ValueError("d-spacing undefined for the (000) reflection")
    return 2 * np.pi / float(np.linalg.norm(reciprocal_vector(idx, a)))


def structure_factor(idx) -> float:
    """Diamond-cubic structure factor 2 cos[(h+k+l) pi/4] for primitive indices."""
    s = sum(_as_index(idx))
    if s % 4 == 2:
        # (h+k+l)/2 odd: kinematically forbidden, return an exact zero
        return 0.0
    return 2 * math.cos(s * math.pi / 4)


def is_forbidden(idx) -> bool:
    return sum(_as_index(idx)) % 4 == 2


def screening_length(Z: int) -> float:
    """Wentzel screening radius a0 / Z^(1/3)."""
    return K.bohr_radius / Z ** (1 / 3)


def wentzel_amplitude(idx, crystal: CrystalSpec, beam: BeamSpec) -> float:
    """Single-atom Wentzel scattering amplitude [m^2] for the reflection ``idx``."""
    idx = _as_index(idx)
    d = d_spacing(idx, crystal.lattice_constant)
    F = structure_factor(idx)
    Z = crystal.atomic_number
    a_s = screening_length(Z)
    lam = electron_wavelength(beam.kinetic_energy)
    return (
        F
        * lorentz_factor(beam.kinetic_energy)
        * 2 * Z ** (2 / 3) * a_s * lam
        / (1 + (2 * math.pi * a_s / d) ** 2)
    )


def order_amplitudes(reference, orders, crystal: CrystalSpec, beam: BeamSpec) -> dict[int, float]:
    """Amplitudes f_n of the multiples n * reference for each selected order."""
    ref = _as_index(reference)
    return {int(n): wentzel_amplitude(n * ref, crystal, beam) for n in orders}


def projected_density(r_perp, crystal: CrystalSpec):
    """Cells per unit area seen along the beam at transverse distance ``r_perp``."""
    r = np.asarray(r_perp, dtype=float)
    u = np.clip(1 - (r / crystal.radius) ** 2, 0.0, None)
    out = crystal.cell_density * 2 * crystal.half_thickness * np.sqrt(u)
    return out[()] if out.ndim == 0 else out


def cell_density_fourier(k_perp, crystal: CrystalSpec):
    """2D Fourier transform of :func:`projected_density`: 3 N_cell j1(kR)/(kR)."""
    k = np.asarray(k_perp, dtype=float)
    return 3 * crystal.cell_count * j1_over_x(k * crystal.radius)


def mass_density_fourier(q, crystal: CrystalSpec, M: float):
    """3D Fourier transform of a homogeneous spheroid of mass M.

    ``q`` has shape (..., 3) with the last axis (q_x, q_y, q_z); z is the
    spheroid's short axis.
    """
    q = np.asarray(q, dtype=float)
    q_perp2 = q[..., 0] ** 2 + q[..., 1] ** 2
    u = np.sqrt(q_perp2 * crystal.radius**2 + (q[..., 2] * crystal.half_thickness) ** 2)
    return 3 * M * j1_over_x(u)
