"""
Conditional grating transformation of the nanoparticle state.

Conditioned on the detected electron position (x, y), the centre-of-mass
state transforms as

    rho -> sum_{n,n'} B[n,n'] exp(2 pi i n (x - X)/d) rho exp(2 pi i n' (X - x)/d)

with a Hermitian, positive semidefinite coefficient matrix B over the
Bragg orders passed by the pinhole mask. The common positive factor
|<r|psi_in_bar>|^2 is not stored; it cancels in every normalised pattern,
and absolute rates are handled by :func:`detection_probability`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import integrate

from .crystal import CrystalSpec, projected_density
from .physics import BeamSpec

__all__ = [
    "MaskSpec",
    "GratingCoefficients",
    "aligned_coefficients",
    "misalignment_factor",
    "misalignment_matrix",
    "misaligned_coefficients",
    "talbot_coefficient",
    "detection_probability",
    "detection_probability_quadrature",
    "smeared_beam_norm",
]

MISALIGNMENT_MODES = ("general", "small_pinhole")


@dataclass(frozen=True)
class MaskSpec:
    """Linear array of Gaussian pinholes selecting Bragg orders ``orders`` of period ``period``."""

    period: float
    orders: tuple[int, ...] = (-2, -1, 1, 2)
    pinhole_width: float = 1e-3

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            raise ValueError("mask must select at least one order")
        if 0 in orders:
            raise ValueError("the undiffracted order n=0 is blocked by the mask")
        if len(set(orders)) != len(orders):
            raise ValueError(f"duplicate orders in {orders}")
        if not self.period > 0:
            raise ValueError("period must be positive")
        if not self.pinhole_width > 0:
            raise ValueError("pinhole_width must be positive")
        object.__setattr__(self, "orders", orders)


@dataclass(frozen=True, eq=False)
class GratingCoefficients:
    """Coefficient matrix B[n, n'] over ``orders`` plus the detected electron position.

    ``sigma_beta`` is None for a perfectly aligned crystal.
    """

    orders: tuple[int, ...]
    matrix: np.ndarray
    x: float = 0.0
    y: float = 0.0
    sigma_beta: float | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        B = np.array(self.matrix, dtype=complex)
        if B.shape != (len(orders), len(orders)):
            raise ValueError("matrix shape does not match the order set")
        scale = np.max(np.abs(B)) if B.size else 0.0
        if np.max(np.abs(B - B.conj().T)) > 1e-12 * scale:
            raise ValueError("coefficient matrix is not Hermitian")
        # exact Hermiticity; removes roundoff such as imaginary parts of f f*
        B = 0.5 * (B + B.conj().T)
        B.setflags(write=False)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "matrix", B)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(orders)})

    def element(self, n: int, m: int) -> complex:
        """B[n, m]; zero if either order is not selected."""
        i, j = self._index.get(n), self._index.get(m)
        if i is None or j is None:
            return 0j
        return complex(self.matrix[i, j])

    def pairs(self):
        """Yield (j, n, B[j, j+n]) for every selected pair of orders."""
        for a, j in enumerate(self.orders):
            for b, k in enumerate(self.orders):
                yield j, k - j, complex(self.matrix[a, b])

    def harmonics(self) -> list[int]:
        return sorted({k - j for j in self.orders for k in self.orders})

    def talbot(self, n: int, xi) -> np.ndarray | complex:
        return talbot_coefficient(self, n, xi)

    @property
    def is_aligned(self) -> bool:
        return self.sigma_beta is None

    def with_position(self, x: float) -> "GratingCoefficients":
        return GratingCoefficients(self.orders, self.matrix, x, self.y, self.sigma_beta)


def _amplitude_vector(mask: MaskSpec, amplitudes) -> np.ndarray:
    if isinstance(amplitudes, Mapping):
        missing = [n for n in mask.orders if n not in amplitudes]
        if missing:
            raise KeyError(f"no amplitude supplied for orders {missing}")
        return np.array([amplitudes[n] for n in mask.orders], dtype=complex)
    f = np.asarray(amplitudes, dtype=complex)
    if f.shape != (len(mask.orders),):
        raise ValueError(f"expected {len(mask.orders)} amplitudes, got shape {f.shape}")
    return f


def aligned_coefficients(mask: MaskSpec, amplitudes, x: float = 0.0, y: float = 0.0) -> GratingCoefficients:
    """Rank-one coefficients B[n, n'] = f_n conj(f_n') of a perfectly aligned crystal.

    ``amplitudes`` is either a mapping order -> f_n or a sequence ordered like
    ``mask.orders``.
    """
    f = _amplitude_vector(mask, amplitudes)
    return GratingCoefficients(mask.orders, np.outer(f, f.conj()), x, y, None)


def misalignment_factor(n: int, m: int, y: float, mask: MaskSpec, sigma_beta: float,
                        mode: str = "general") -> float:
    """Coherence factor D[n, m] from a Gaussian spread ``sigma_beta`` of nutation angles.

    ``mode="general"`` evaluates the Gaussian average for arbitrary pinhole
    width; ``mode="small_pinhole"`` is its limit for pinholes much narrower
    than the angular spread (xi << sigma_beta).
    """
    xi = mask.pinhole_width
    d = mask.period
    if not sigma_beta > 0:
        raise ValueError("sigma_beta must be positive")
    s = n * n + m * m
    if mode == "general":
        denom = xi * xi + s * sigma_beta**2
        pref = xi / math.sqrt(denom)
        expo = 2 * math.pi**2 * (n - m) ** 2 * sigma_beta**2 * xi**2 / denom * (y / d) ** 2
    elif mode == "small_pinhole":
        pref = xi / (sigma_beta * math.sqrt(s))
        expo = 2 * math.pi**2 * xi**2 * y**2 / d**2 * (n - m) ** 2 / s
    else:
        raise ValueError(f"mode must be one of {MISALIGNMENT_MODES}, got {mode!r}")
    return pref * math.exp(-expo)


def misalignment_matrix(mask: MaskSpec, y: float, sigma_beta: float, mode: str = "general") -> np.ndarray:
    return np.array([[misalignment_factor(n, m, y, mask, sigma_beta, mode)
                      for m in mask.orders] for n in mask.orders])


def misaligned_coefficients(mask: MaskSpec, amplitudes, sigma_beta: float, y: float,
                            x: float = 0.0, mode: str = "general") -> GratingCoefficients:
    """Partially coherent coefficients f_n conj(f_n') D[n, n'](y)."""
    f = _amplitude_vector(mask, amplitudes)
    B = np.outer(f, f.conj()) * misalignment_matrix(mask, y, sigma_beta, mode)
    return GratingCoefficients(mask.orders, B, x, y, sigma_beta)


def talbot_coefficient(coeffs: GratingCoefficients, n: int, xi):
    """Talbot coefficient B_n(xi) = sum_j B[j, j+n] exp(i pi xi (n + 2j)).

    ``xi`` may be an array; pairs outside the selected orders contribute zero.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    for j in coeffs.orders:
        b = coeffs.element(j, j + n)
        if b != 0:
            out = out + b * np.exp(1j * np.pi * xi * (n + 2 * j))
    return out[()] if out.ndim == 0 else out


def _beam_bracket(dk: float, R: float) -> float:
    u = dk * dk * R * R
    if u < 1e-3:
        # 2 - (1 - exp(-2u))/u cancels for small u; series to u^4
        return u * (2 - u * (4 / 3 - u * (2 / 3 - u * 4 / 15)))
    return 2 + math.expm1(-2 * u) / u


def smeared_beam_norm(crystal: CrystalSpec, beam: BeamSpec) -> float:
    """<psi_bar|psi_bar> for the unit-norm Gaussian beam masked by the projected density."""
    N, V, b = crystal.cell_count, crystal.volume, crystal.half_thickness
    return 2 * N * N * b * b / V**2 * _beam_bracket(beam.transverse_width, crystal.radius)


def detection_probability(crystal: CrystalSpec, beam: BeamSpec, amplitudes) -> float:
    """Probability of detecting a Bragg-filtered electron anywhere, to linear order in f.

    Values above one signal that the linearised scattering operator is out
    of its validity range (phase f_n * projected density of order one).
    """
    f = np.asarray(list(amplitudes.values()) if isinstance(amplitudes, Mapping) else amplitudes, dtype=complex)
    return smeared_beam_norm(crystal, beam) * float(np.sum(np.abs(f) ** 2))


def detection_probability_quadrature(crystal: CrystalSpec, beam: BeamSpec, amplitudes) -> float:
    """Same quantity as :func:`detection_probability` by radial quadrature of rho_bar^2 |psi_in|^2."""
    f = np.asarray(list(amplitudes.values()) if isinstance(amplitudes, Mapping) else amplitudes, dtype=complex)
    dk = beam.transverse_width
    R = crystal.radius

    def integrand(r):
        psi2 = 2 * dk * dk / math.pi * math.exp(-2 * dk * dk * r * r)
        return 2 * math.pi * r * float(projected_density(r, crystal)) ** 2 * psi2

    norm, _ = integrate.quad(integrand, 0.0, R, epsabs=0.0, epsrel=1e-10, limit=200)
    return norm * float(np.sum(np.abs(f) ** 2))
