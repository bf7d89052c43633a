"""Talbot times and free-fall distances across nanoparticle masses.

The Bragg period d = 192 pm of silicon's (1,-1,0) planes sets the Talbot
time T_M = M d^2 / h. Interference needs about 2 T_M of free fall, which is
short enough to recapture the particle in the same trap for masses up to
~1e11 amu.
"""

from endsim.constants import CODATA2022 as K
from endsim.systematics import TABLE_MASSES_AMU, talbot_table
from _case import d

print(f"grating period d = {d * 1e12:.2f} pm\n")
print(f"{'mass [amu]':>12} {'T_M [s]':>10} {'2 g T_M^2 [m]':>14}")
for row in talbot_table([m * K.amu for m in TABLE_MASSES_AMU], d):
    print(f"{row.mass / K.amu:12.3g} {row.talbot_time:10.2e} {row.free_fall:14.2e}")
