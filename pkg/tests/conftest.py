import math

import pytest

from endsim.constants import CODATA2022 as K, UNITS
from endsim.crystal import SILICON, d_spacing, order_amplitudes
from endsim.grating import MaskSpec, aligned_coefficients
from endsim.interference import EvolutionParams
from endsim.physics import BeamSpec, source_state, talbot_time


class CaseStudy:
    """Silicon nanocrystal, 300 keV beam, orders +-1, +-2 of (1,-1,0)."""

    crystal = SILICON
    beam = BeamSpec.from_spot_hwhm(300 * UNITS["keV"], 115e-9)
    mass = 2e9 * K.amu
    omega = 2 * math.pi * 305e3
    temperature = 12e-6
    reference = (1, -1, 0)
    orders = (-2, -1, 1, 2)

    def __init__(self):
        self.state = source_state(self.mass, self.omega, self.temperature)
        self.d = d_spacing(self.reference, self.crystal.lattice_constant)
        self.T_M = talbot_time(self.mass, self.d)
        self.mask = MaskSpec(self.d, self.orders, 1e-3)
        self.f = order_amplitudes(self.reference, self.orders, self.crystal, self.beam)
        self.B = aligned_coefficients(self.mask, self.f)

    def params(self, t_over_TM=1.0, t0_over_TM=1.0):
        return EvolutionParams(t0_over_TM * self.T_M, t_over_TM * self.T_M, self.state, self.d)

    def pair(self, N):
        """Aligned coefficients for the single pair of orders +-N."""
        mask = MaskSpec(self.d, (-N, N), 1e-3)
        return aligned_coefficients(mask, order_amplitudes(self.reference, mask.orders, self.crystal, self.beam))


@pytest.fixture(scope="session")
def case():
    return CaseStudy()


_acceptance = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" in props and (report.when == "call" or report.outcome != "passed"):
        _acceptance.append((props["criterion"], report.outcome, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit, outcome, detail in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  criterion {crit}: {detail}")
