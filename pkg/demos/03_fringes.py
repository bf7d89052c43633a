"""Quantum fringes versus the classical shadow at several evolution times.

With t0 = T_M the fringe period magnifies as D = d (1 + t/t0). At t = T_M
the odd Talbot harmonics of the +-1, +-2 mask cancel, the quantum period-D
contrast nearly vanishes and the pattern is dominated by the half-period
harmonic, while the classical shadow keeps strong period-D fringes.
"""

from endsim.interference import fringe_pattern, fringe_period, quantum_classical_distance, visibility
from _case import B, params, sparkline

for t in (0.25, 0.5, 1.0, 1.5, 2.0):
    fp = fringe_pattern(B, params(t))
    X = fp.relative_positions
    print(f"t = {t:4.2f} T_M   D = {fp.period * 1e12:6.1f} pm   "
          f"fitted {fringe_period(X, fp.quantum_density, fp.sigma_x_tilde) * 1e12:6.1f} pm   "
          f"visibility q/c = {visibility(fp):.3f}/{visibility(fp, 'classical'):.3f}   "
          f"L1 = {quantum_classical_distance(fp):.3f}")
    print("  quantum   |" + sparkline(fp.quantum_density) + "|")
    print("  classical |" + sparkline(fp.classical_density) + "|")
