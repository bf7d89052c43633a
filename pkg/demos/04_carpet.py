"""Talbot carpet over two Talbot times and where quantum and classical differ most.

The quantum-classical L1 distance peaks near t = T_M / 2, where the odd
harmonics are inverted relative to the classical shadow, and has a second
local maximum at t = T_M.
"""

import numpy as np

from endsim.interference import carpet, default_grid, fringe_pattern, quantum_classical_distance
from _case import B, T_M, params, sparkline

ts = np.linspace(0, 2, 81) * T_M
base = params(1.0)
X = default_grid(base.at(ts[-1]), 1024)
cp = carpet(ts, X, B, base)
# distances on each time's own grid; the common carpet grid is too coarse for the narrow early envelopes
L = np.array([quantum_classical_distance(fringe_pattern(B, base.at(t), n_points=4096)) for t in ts])

for i in range(0, ts.size, 8):
    print(f"{ts[i] / T_M:4.2f} T_M |{sparkline(cp.quantum[i], 60)}|  L1 = {L[i]:.3f}")
i = int(np.argmax(L))
print(f"\nlargest L1 = {L[i]:.4f} at t = {ts[i] / T_M:.3f} T_M; at t = T_M: {L[40]:.4f}")
