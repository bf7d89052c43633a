"""
Macrorealistic-modification decoherence and the empirical macroscopicity.

The modification adds a Lindblad term whose position-space rate is
Gamma(0) - Gamma(X - X'), with a Gaussian momentum-kick distribution of
width ``sigma_q`` and time parameter ``tau0``. For coherences on the atomic
scale it is quadratic in X - X' with a coefficient set by the double
integral :func:`form_factor_integral` over the spheroid's form factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import CODATA2022 as K
from .crystal import CrystalSpec
from .physics import talbot_time
from .special import j1_over_x

__all__ = [
    "ModificationParams",
    "MacroResult",
    "QuadratureError",
    "spheroid_integral",
    "form_factor_integral",
    "gamma_difference",
    "tau_max",
    "macroscopicity_mu",
]

# Gaussian weight exp(-xi^2/2) < 1e-31 beyond this cutoff
XI_MAX = 12.0
SIGMA_Q_BOUNDS = (1e5, 1e9)


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModificationParams:
    tau0: float
    sigma_q: float
    reference_mass: float = K.electron_mass

    def __post_init__(self):
        if not (self.tau0 > 0 and self.sigma_q > 0 and self.reference_mass > 0):
            raise ValueError("tau0, sigma_q and reference_mass must be positive")
        if 1 / self.sigma_q < 1e-9 * (1 - 1e-12):
            raise ValueError("sigma_q restricted to 1/sigma_q >= 1 nm")


@dataclass(frozen=True)
class MacroResult:
    mu: float
    argmax_sigma_q: float
    tau_max: float
    sigma_q_grid: np.ndarray
    tau_max_grid: np.ndarray
    boundary_maximum: bool


def _panel_rule(upper: float, freq: float, nodes: int):
    """Composite Gauss-Legendre nodes/weights on [0, upper], panels no wider than half an oscillation."""
    n_panels = max(12, math.ceil(upper * freq / math.pi))
    x, w = np.polynomial.legendre.leggauss(nodes)
    h = upper / n_panels
    left = np.arange(n_panels)[:, None] * h
    return (left + 0.5 * h * (x + 1)).ravel(), np.broadcast_to(0.5 * h * w, (n_panels, nodes)).ravel()


def _tensor_rule(alpha, beta, power, nodes, chunk=256):
    xp, wp = _panel_rule(XI_MAX, alpha, nodes)
    xz, wz = _panel_rule(XI_MAX, beta, nodes)
    gz = wz * np.exp(-0.5 * xz * xz)
    gp = wp * xp**3 * np.exp(-0.5 * xp * xp)
    total = 0.0
    for s in range(0, xp.size, chunk):
        u = np.sqrt((alpha * xp[s:s + chunk, None]) ** 2 + (beta * xz[None, :]) ** 2)
        total += gp[s:s + chunk] @ (j1_over_x(u) ** power @ gz)
    return float(total)


def spheroid_integral(alpha: float, beta: float, power: int = 1, *,
                      epsabs: float = 1e-8, epsrel: float = 0.0) -> float:
    """Double integral over xi_perp, xi_z in [0, 12] of

        xi_perp^3 exp(-(xi_perp^2 + xi_z^2)/2) [j1(u)/u]^power,   u = sqrt(alpha^2 xi_perp^2 + beta^2 xi_z^2)

    ``power=1`` is the single-power kernel, with I(0, 0) = (2/3) sqrt(pi/2);
    ``power=2`` is the kernel |form factor|^2 that enters the decoherence
    rate (see :func:`form_factor_integral`). The Gaussian weight beyond the
    cutoff 12 is below 1e-31.

    Tensor-product Gauss-Legendre panels, each at most half a Bessel
    oscillation wide; the node count per panel doubles until two successive
    estimates agree within max(epsabs, epsrel * |I|).
    """
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    prev = _tensor_rule(alpha, beta, power, 4)
    history = [prev]
    for nodes in (8, 16, 32):
        cur = _tensor_rule(alpha, beta, power, nodes)
        history.append(cur)
        if abs(cur - prev) <= max(epsabs, epsrel * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"spheroid integral not converged at alpha={alpha:g}, beta={beta:g}, "
                          f"power={power}: successive estimates {history}")


def form_factor_integral(alpha: float, beta: float) -> float:
    """Spheroid integral with the squared form-factor kernel [j1(u)/u]^2.

    Tolerances are relative, because the integral becomes tiny for
    alpha, beta >> 1 while still setting the decoherence rate.
    """
    return spheroid_integral(alpha, beta, power=2, epsabs=1e-300, epsrel=1e-10)


def gamma_difference(dX, M: float, params: ModificationParams, crystal: CrystalSpec):
    """Gamma(0) - Gamma(dX) [1/s] to lowest order in dX (valid for |dX| of order d)."""
    sq = params.sigma_q
    I = form_factor_integral(sq * crystal.radius, sq * crystal.half_thickness)
    pref = 9 * M**2 * sq**2 / (2 * math.sqrt(2 * math.pi) * params.reference_mass**2 * params.tau0)
    return pref * np.asarray(dX, dtype=float) ** 2 * I


def tau_max(sigma_q: float, M: float, d: float, t: float, crystal: CrystalSpec,
            T_M: float | None = None, reference_mass: float = K.electron_mass) -> float:
    """Largest tau0 excluded by observing half the n = 2 fringe contrast at time t.

    Assumes t0 = T_M; a different pre-grating time changes the prefactor
    and is not supported.
    """
    if T_M is None:
        T_M = talbot_time(M, d)
    if not (t > 0 and T_M > 0 and sigma_q > 0):
        raise ValueError("t, T_M and sigma_q must be positive")
    I = form_factor_integral(sigma_q * crystal.radius, sigma_q * crystal.half_thickness)
    return (6 * (M / reference_mass) ** 2 / (math.sqrt(2 * math.pi) * math.log(2))
            * t * t / (t + T_M) * (sigma_q * d) ** 2 * I)


def macroscopicity_mu(M: float, d: float, t: float, crystal: CrystalSpec, *,
                      bounds: tuple[float, float] = SIGMA_Q_BOUNDS, n_scan: int = 64,
                      rtol: float = 1e-3, reference_mass: float = K.electron_mass,
                      map_fn=map) -> MacroResult:
    """Maximise tau_max over sigma_q; mu = log10 of the maximum in seconds.

    A log-spaced scan brackets the maximum, then golden-section search on
    log10(sigma_q) refines it. A maximum on a search bound is flagged, not
    raised. ``map_fn`` may be a parallel map; results do not depend on it.
    """
    lo, hi = bounds
    if not 0 < lo < hi:
        raise ValueError("bounds must satisfy 0 < lower < upper")
    T_M = talbot_time(M, d)
    grid = np.logspace(math.log10(lo), math.log10(hi), n_scan)

    def tau(s):
        return tau_max(float(s), M, d, t, crystal, T_M, reference_mass)

    taus = np.array(list(map_fn(tau, grid)))
    i = int(np.argmax(taus))
    if i == 0 or i == n_scan - 1:
        return MacroResult(float(np.log10(taus[i])), float(grid[i]), float(taus[i]), grid, taus, True)

    la, lc = math.log10(grid[i - 1]), math.log10(grid[i + 1])
    best_ls, best_tau = _golden_max(lambda ls: tau(10.0**ls), la, lc, rtol)
    if best_tau < taus[i]:
        best_ls, best_tau = math.log10(grid[i]), float(taus[i])
    return MacroResult(math.log10(best_tau), 10.0**best_ls, best_tau, grid, taus, False)


_INVPHI = (math.sqrt(5) - 1) / 2


def _golden_max(f, a, b, rtol, xtol=1e-6, max_iter=200):
    """Golden-section search for the maximum of a unimodal f on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(fc - fd) <= rtol * max(abs(fc), abs(fd)) and b - a < xtol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)
