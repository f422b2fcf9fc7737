import math

import pytest
from conftest import make_trap
from hypothesis import given, settings
from hypothesis import strategies as st

from interworld.constants import DIPOLE_MU_B_OVER_C, H2_MASS, TORR
from interworld.drive import ExcitationModel, PulseKind, PulseSpec, make_mwi_pulse, make_pi_pulse
from interworld.protocol import ProtocolScenario
from interworld.quantum import Branch, Stage
from interworld.scenario import (
    InvariantError,
    ScenarioNotFoundError,
    ScenarioSyntaxError,
    UnitMismatchError,
    UnknownKeyError,
    loads_scenario,
    parse_scenario,
    reference_scenario_path,
    serialize_scenario,
    write_scenario,
)

MINIMAL = """\
schema_version = 1

[trap]
temperature_k = 300.0
pressure_torr = 1e-9
gas_molecule_mass_kg = 3.3474e-27
elastic_cross_section_m2 = 2.4e-18
confining_field_v_per_m = 1000.0
field_variability_fraction = 1e-10
field_variability_frequency_per_s = 1.0
trap_extension_um = 1.0
ion_mass_u = 198.968

[pulse_policy.branch1]
kind = "mwi_pi"
pi_time_s = 1.0

[run]
n_trials = 10
seed = 3
"""


def test_bundled_reference_scenario():
    s = parse_scenario(reference_scenario_path())
    assert s.trap.pressure == pytest.approx(1e-9 * TORR, rel=1e-15)
    assert s.trap.gas_molecule_mass == pytest.approx(H2_MASS, rel=1e-12)
    assert s.trap.elastic_cross_section_sigma_c == 2.4e-18
    assert s.trap.photon_cross_section == 5.2e-40
    assert s.trap.confining_field_E_c == 1000.0
    assert s.pulse == make_mwi_pulse(1.0, DIPOLE_MU_B_OVER_C, 4.05e10)
    assert s.model is ExcitationModel.FEEDBACK
    assert s.stage_times[Stage.T2] == pytest.approx(2e-6)


def test_minimal_scenario_defaults():
    s = loads_scenario(MINIMAL)
    assert s.trap.trap_extension_d == pytest.approx(1e-6)
    assert s.n_trials == 10 and s.seed == 3
    assert s.pulse.kind is PulseKind.MWI_PI


def error_for(text):
    with pytest.raises(Exception) as info:
        loads_scenario(text, path="case.toml")
    return info.value


def test_pressure_in_wrong_unit():
    err = error_for(MINIMAL.replace("pressure_torr", "pressure_v_per_m"))
    assert isinstance(err, UnitMismatchError)
    assert err.key == "trap.pressure_v_per_m"
    assert err.line == 5
    assert "line 5" in str(err) and "pressure_v_per_m" in str(err)


def test_missing_unit_suffix():
    err = error_for(MINIMAL.replace("pressure_torr", "pressure"))
    assert isinstance(err, UnitMismatchError) and err.key == "trap.pressure"


def test_unknown_key():
    err = error_for(MINIMAL.replace("[run]\n", "[run]\ncolour = 3\n"))
    assert isinstance(err, UnknownKeyError)
    assert err.key == "run.colour"
    assert err.line == MINIMAL.splitlines().index("[run]") + 2


def test_unknown_top_level_key():
    assert isinstance(error_for("bogus = 1\n" + MINIMAL), UnknownKeyError)


def test_syntax_error():
    err = error_for(MINIMAL.replace("temperature_k = 300.0", "temperature_k = = 300"))
    assert isinstance(err, ScenarioSyntaxError)
    assert "line 4" in str(err)


def test_invariant_violation_names_key():
    err = error_for(MINIMAL.replace("temperature_k = 300.0", "temperature_k = -3.0"))
    assert isinstance(err, InvariantError) and err.key == "trap.temperature_k" and err.line == 4
    err = error_for(MINIMAL.replace("n_trials = 10", "n_trials = 0"))
    assert isinstance(err, InvariantError)
    err = error_for(MINIMAL.replace("n_trials = 10", 'n_trials = "ten"'))
    assert isinstance(err, InvariantError) and err.key == "run.n_trials"


def test_bad_schema_version():
    assert isinstance(error_for(MINIMAL.replace("schema_version = 1", "schema_version = 2")), InvariantError)


def test_pulse_errors():
    assert isinstance(error_for(MINIMAL.replace('kind = "mwi_pi"', 'kind = "square"')), InvariantError)
    assert isinstance(error_for(MINIMAL.replace('kind = "mwi_pi"', 'kind = "custom"')), InvariantError)
    assert isinstance(error_for(MINIMAL.replace("branch1", "branch3")), UnknownKeyError)


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioNotFoundError) as info:
        parse_scenario(tmp_path / "absent.toml")
    assert "absent.toml" in str(info.value)


def test_zero_pressure_allowed_negative_not():
    s = loads_scenario(MINIMAL.replace("pressure_torr = 1e-9", "pressure_pa = 0.0"))
    assert s.trap.pressure == 0.0
    assert isinstance(error_for(MINIMAL.replace("pressure_torr = 1e-9", "pressure_pa = -1.0")), InvariantError)


def test_file_round_trip(tmp_path):
    s = parse_scenario(reference_scenario_path())
    path = write_scenario(s, tmp_path / "s.toml")
    assert parse_scenario(path) == s


pos = st.floats(1e-30, 1e30, allow_nan=False, allow_infinity=False)


@st.composite
def scenarios(draw):
    trap = make_trap(
        pressure=draw(st.floats(0, 1e5)),
        temperature=draw(st.floats(1e-3, 1e4)),
        gas_molecule_mass=draw(pos),
        elastic_cross_section_sigma_c=draw(st.floats(0, 1e-10)),
        confining_field_E_c=draw(pos),
        field_variability_fraction_f_v=draw(st.floats(0, 1)),
        field_variability_frequency=draw(pos),
        trap_extension_d=draw(pos),
        ion_mass=draw(pos),
        photon_cross_section=draw(st.floats(0, 1e-30)),
    )
    branch = draw(st.sampled_from(list(Branch)))
    t_p = draw(st.floats(1e-9, 1e3))
    kind = draw(st.sampled_from(["pi", "mwi", "custom", "none"]))
    dipole = draw(st.floats(1e-35, 1e-28))
    omega = draw(st.floats(1.0, 1e15))
    if kind == "pi":
        pulse = make_pi_pulse(t_p, dipole, omega, branch)
    elif kind == "mwi":
        pulse = make_mwi_pulse(t_p, dipole, omega, branch)
    elif kind == "custom":
        pulse = PulseSpec(draw(st.floats(0, 1e3)), draw(st.floats(0, 1e6)), dipole, omega, PulseKind.CUSTOM, branch)
    else:
        pulse = None
    gaps = draw(st.lists(st.floats(1e-9, 1.0), min_size=4, max_size=4))
    t = draw(st.floats(0, 1.0))
    times = {}
    for stage, gap in zip((Stage.T0, Stage.T1, Stage.T2, Stage.EXCITATION_WINDOW), [0.0] + gaps[1:]):
        t += gap
        times[stage] = t
    return ProtocolScenario(
        trap=trap,
        pulse_policy={branch: pulse},
        stage_times=times,
        wait_before_readout=draw(st.floats(1e-9, 1e6)),
        n_trials=draw(st.integers(1, 10**6)),
        seed=draw(st.integers(0, 2**64 - 1)),
        model=draw(st.sampled_from(list(ExcitationModel))),
        photon_split=draw(st.floats(0, 1)),
        hyperfine_frequency=draw(pos),
    )


@settings(max_examples=100, deadline=None)
@given(scenarios())
def test_serialize_parse_round_trip(scenario):
    assert loads_scenario(serialize_scenario(scenario)) == scenario
