"""Imperfect crystal alignment: fringe visibility against the detected electron's y.

A Gaussian spread of nutation angles turns the position y of the electron
perpendicular to the grating axis into a which-order phase, which washes out
the coherences between orders n != m.
"""

from endsim.grating import misaligned_coefficients
from endsim.interference import fringe_pattern, visibility
from _case import B, crystal, f, mask, params

R = crystal.radius
ys = (0.0, R / 4, R / 2, R)
print("t/T_M  aligned   " + "  ".join(f"y={y / R:4.2f}R" for y in ys))
for t in (0.5, 1.0, 1.5, 2.0):
    p = params(t)
    va = visibility(fringe_pattern(B, p))
    vs = [visibility(fringe_pattern(misaligned_coefficients(mask, f, 0.05, y, mode="small_pinhole"), p)) for y in ys]
    print(f"{t:5.2f}  {va:7.4f}   " + "  ".join(f"{v:8.4f}" for v in vs))
print("\nat t = T_M the aligned period-D contrast is already ~0 (odd harmonics cancel),"
      "\nso misalignment can only add contrast there")
