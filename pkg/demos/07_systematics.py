"""Order-of-magnitude systematic effects for the silicon case study."""

from endsim.systematics import systematics_report
from _case import cfg, d, mass

rep = systematics_report(cfg.si("beam.energy"), mass, d)
print(f"electron deflection by one localized charge at 1 nm: {rep.deflection_angle:.2e} rad")
print(f"mirror-charge drift within 2 T_M in a 2 mm cavity:   {rep.mirror_shift * 1e12:.2f} pm (d = {d * 1e12:.0f} pm)")
print(f"velocity kick from one backscattered electron:       {rep.backscatter_velocity * 1e3:.3f} mm/s")
