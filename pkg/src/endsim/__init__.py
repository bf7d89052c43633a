"""
endsim: electron-enabled nanoparticle diffraction in closed form.

A levitated nanocrystal Bragg-scatters a single electron; detecting the
electron behind a pinhole mask imprints a grating transformation of
period d on the crystal's centre-of-mass state. The package computes the
grating coefficients, the resulting quantum and classical near-field fringe
patterns, misalignment and macrorealistic decoherence, the empirical
macroscopicity, and a few systematic-effect estimates. All quantities are SI.
"""

from .constants import CODATA2022, SNAPSHOT_HASH, UNITS, from_si, to_si
from .crystal import (
    SILICON,
    CrystalSpec,
    MillerIndex,
    cell_density_fourier,
    d_spacing,
    is_forbidden,
    mass_density_fourier,
    order_amplitudes,
    projected_density,
    reciprocal_vector,
    structure_factor,
    to_conventional,
    wentzel_amplitude,
)
from .grating import (
    GratingCoefficients,
    MaskSpec,
    aligned_coefficients,
    detection_probability,
    detection_probability_quadrature,
    misaligned_coefficients,
    misalignment_factor,
    misalignment_matrix,
    talbot_coefficient,
)
from .interference import (
    Carpet,
    EvolutionParams,
    FringePattern,
    PropagatedWidths,
    broad_envelope_pattern,
    carpet,
    classical_pattern,
    decohered_reduction,
    fringe_pattern,
    fringe_period,
    propagated_widths,
    quantum_classical_distance,
    quantum_pattern,
    visibility,
)
from .macroscopicity import (
    MacroResult,
    ModificationParams,
    QuadratureError,
    form_factor_integral,
    gamma_difference,
    macroscopicity_mu,
    spheroid_integral,
    tau_max,
)
from .physics import (
    BeamSpec,
    GaussianState,
    electron_momentum,
    electron_wavelength,
    free_fall_distance,
    source_state,
    talbot_time,
    thermal_factor,
)
from .systematics import (
    SystematicsReport,
    backscatter_recoil,
    charge_deflection_angle,
    mirror_charge_shift,
    systematics_report,
    talbot_table,
)

__version__ = "0.1.0"
