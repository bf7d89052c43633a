"""Macrorealistic modification: excluded tau0 and the macroscopicity mu.

Observing half the n = 2 fringe contrast after t = 1 ms excludes collapse
time parameters tau0 < tau_max(sigma_q). Maximising over the kick width
sigma_q gives mu = log10(max tau_max / 1 s).
"""

import numpy as np

from endsim.macroscopicity import macroscopicity_mu
from _case import crystal, d, mass

res = macroscopicity_mu(mass, d, 1e-3, crystal)
for s, tau in list(zip(res.sigma_q_grid, res.tau_max_grid))[::8]:
    print(f"sigma_q = {s:9.3e} 1/m   log10 tau_max = {np.log10(tau):7.3f}")
print(f"\nmu = {res.mu:.3f} at sigma_q = {res.argmax_sigma_q:.4g} 1/m "
      f"(1/sigma_q = {1e9 / res.argmax_sigma_q:.1f} nm)")
