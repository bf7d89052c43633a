"""Shared silicon case-study setup for the demo scripts."""

from endsim.config import load_config

cfg = load_config("case_study")
crystal = cfg.crystal()
beam = cfg.beam()
mass = cfg.mass()
d = cfg.period()
T_M = cfg.talbot_time()
state = cfg.state()
mask = cfg.mask()
f = cfg.amplitudes()
B = cfg.coefficients("perfect")


def params(t_over_TM):
    """Evolution parameters with t0 = T_M and t given in units of T_M."""
    return cfg.evolution(t_over_TM * T_M)


def sparkline(values, width=72):
    """Coarse text rendering of a 1D profile."""
    import numpy as np

    bars = " .:-=+*#%@"
    v = np.asarray(values, dtype=float)
    v = v[np.linspace(0, v.size - 1, width).astype(int)]
    v = (v - v.min()) / (np.ptp(v) or 1.0)
    return "".join(bars[int(round(x * (len(bars) - 1)))] for x in v)
