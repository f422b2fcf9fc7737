import math

import pytest

from interworld.constants import H2_MASS, HG199_MASS, TORR
from interworld.decoherence import TrapConfig
from interworld.drive import ExcitationModel, make_mwi_pulse
from interworld.protocol import ProtocolScenario
from interworld.quantum import Branch


def make_trap(pressure=1e-9 * TORR, **kw):
    base = dict(
        temperature=300.0,
        pressure=pressure,
        gas_molecule_mass=H2_MASS,
        elastic_cross_section_sigma_c=2.4e-18,
        confining_field_E_c=1000.0,
        field_variability_fraction_f_v=1e-10,
        field_variability_frequency=1.0,
        trap_extension_d=1e-6,
        ion_mass=HG199_MASS,
        photon_cross_section=5.2e-40,
    )
    base.update(kw)
    return TrapConfig(**base)


def isolated_trap():
    """Every decoherence channel switched off."""
    return make_trap(
        pressure=0.0,
        elastic_cross_section_sigma_c=0.0,
        photon_cross_section=0.0,
        field_variability_fraction_f_v=0.0,
    )


def make_scenario(trap=None, pulse=True, model=ExcitationModel.FEEDBACK, **kw):
    policy = {Branch.BRANCH1: make_mwi_pulse(1.0)} if pulse else {}
    return ProtocolScenario(trap=trap or make_trap(), pulse_policy=policy, model=model, **kw)


@pytest.fixture
def reference_scenario():
    return make_scenario(wait_before_readout=0.5, n_trials=2000, seed=17)


@pytest.fixture
def ideal_scenario():
    return make_scenario(isolated_trap(), model=ExcitationModel.ONE_AND_ONLY_ONE, n_trials=1000, seed=5)


ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
