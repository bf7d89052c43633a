"""From crystal to grating: Bragg amplitudes, coefficient matrix and detection probability.

Orders +-1, +-2 of the (1,-1,0) reflection are selected by a four-pinhole
mask. The aligned coefficient matrix is the rank-one outer product of the
linearised Wentzel amplitudes.
"""

import numpy as np

from endsim.crystal import d_spacing, is_forbidden, structure_factor, to_conventional
from endsim.grating import detection_probability, detection_probability_quadrature
from _case import B, beam, crystal, f

ref = (1, -1, 0)
print(f"reference reflection {ref} (conventional {tuple(to_conventional(ref))}), "
      f"d = {d_spacing(ref, crystal.lattice_constant) * 1e12:.2f} pm")
for n in (1, 2, 3):
    idx = tuple(n * c for c in ref)
    print(f"  order {n}: structure factor {structure_factor(idx):+.3f}, forbidden: {is_forbidden(idx)}")
print(f"electron wavelength {beam.wavelength * 1e12:.4f} pm")
print("amplitudes [pm^2]:", {n: round(v * 1e24, 4) for n, v in f.items()})

np.set_printoptions(precision=4, suppress=True)
print("\ncoefficient matrix B / max|B|:\n", (B.matrix / np.abs(B.matrix).max()).real)
print("eigenvalues:", np.linalg.eigvalsh(B.matrix) / np.abs(B.matrix).max())

closed = detection_probability(crystal, beam, f)
quad = detection_probability_quadrature(crystal, beam, f)
print(f"\nPr_det closed form {closed:.5f}, quadrature {quad:.5f}")
print("(a value above 1 means the linearised single-scattering model is outside its range here)")
