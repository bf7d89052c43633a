"""Spherical Bessel helpers used by the form factors."""

from __future__ import annotations

import numpy as np

__all__ = ["j1", "j1_over_x", "J1_FIRST_ZERO"]

# first positive root of j1
J1_FIRST_ZERO = 4.493409457909064

# closed forms cancel catastrophically near zero; below this switch to the series
_SERIES_CUTOFF = 0.1


def j1_over_x(x):
    """j1(x)/x for real x, with the limit 1/3 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_CUTOFF
    xs = x[small] ** 2
    out[small] = 1 / 3 - xs / 30 * (1 - xs / 28 * (1 - xs / 54 * (1 - xs / 88)))
    xl = x[~small]
    out[~small] = (np.sin(xl) - xl * np.cos(xl)) / xl**3
    return out[()] if out.ndim == 0 else out


def j1(x):
    """Spherical Bessel function of the first kind, order one."""
    x = np.asarray(x, dtype=float)
    return x * j1_over_x(x)
