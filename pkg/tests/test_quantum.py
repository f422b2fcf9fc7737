import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from interworld.constants import HBAR, HYPERFINE_OMEGA
from interworld.quantum import (
    Branch,
    BranchedState,
    InterWorldDensityMatrix,
    Stage,
    TimelineStage,
    advance_stage,
    branch_probabilities,
    energy_ledger,
    initial_state,
    relative_density_matrix,
)

splits = st.floats(0.0, 1.0)
unit = st.floats(0.0, 1.0)


def at_t2(split=0.5):
    s = initial_state(split)
    s = advance_stage(s, TimelineStage(Stage.T1, 1e-6))
    return advance_stage(s, TimelineStage(Stage.T2, 2e-6))


def at_t3(split=0.5, p1=0.0, p2=0.0, coherence=1.0, pulsed=None):
    s = advance_stage(at_t2(split), TimelineStage(Stage.EXCITATION_WINDOW, 3e-6))
    s = advance_stage(s, TimelineStage(Stage.T3, 4.0))
    return replace(
        s,
        a1_excited_amp=complex(math.sqrt(p1)),
        a2_excited_amp=complex(math.sqrt(p2)),
        coherence_factor=coherence,
        pulsed_branch=pulsed,
    )


@pytest.mark.parametrize(
    "split, w1, w2",
    [(0.5, 1 / math.sqrt(2), 1 / math.sqrt(2)), (1.0, 1.0, 0.0), (0.25, 0.5, math.sqrt(0.75))],
)
def test_initial_state(split, w1, w2):
    s = initial_state(split)
    assert s.stage.tag is Stage.T0
    assert s.w1_amp == pytest.approx(w1, abs=1e-15)
    assert s.w2_amp == pytest.approx(w2, abs=1e-15)
    assert s.coherence_factor == 1.0
    assert s.a1_excited_amp == s.a2_excited_amp == 0


@pytest.mark.parametrize("bad", [-0.1, 1.5, math.nan])
def test_initial_state_rejects_bad_split(bad):
    with pytest.raises(ValueError):
        initial_state(bad)


def test_advance_stage_keeps_amplitudes():
    s0 = initial_state(0.5)
    s1 = advance_stage(s0, TimelineStage(Stage.T1, 1e-6))
    s2 = advance_stage(s1, TimelineStage(Stage.T2, 2e-6))
    for s in (s1, s2):
        assert (s.w1_amp, s.w2_amp, s.coherence_factor) == (s0.w1_amp, s0.w2_amp, s0.coherence_factor)
    assert s2.stage.tag is Stage.T2


def test_advance_stage_rejects_skips_and_time_reversal():
    s0 = initial_state(0.5)
    with pytest.raises(ValueError):
        advance_stage(s0, TimelineStage(Stage.T3, 1.0))
    with pytest.raises(ValueError):
        advance_stage(s0, TimelineStage(Stage.T1, 0.0))


def test_excitation_forbidden_before_window():
    with pytest.raises(ValueError):
        replace(at_t2(), a1_excited_amp=0.5)


def test_unnormalized_weights_rejected():
    with pytest.raises(ValueError):
        BranchedState(TimelineStage(Stage.T0), 1.0, 0.1)
    with pytest.raises(ValueError):
        BranchedState(TimelineStage(Stage.T0), complex(math.nan, 0), 1.0)


def test_density_matrix_fresh_state_all_half():
    rho = relative_density_matrix(at_t2())
    for el in (rho.rho11, rho.rho12, rho.rho21, rho.rho22):
        assert el == pytest.approx(0.5, abs=1e-15)


def test_density_matrix_fully_decohered_is_half_identity():
    rho = relative_density_matrix(replace(at_t2(), coherence_factor=0.0))
    np.testing.assert_allclose(rho.to_array(), 0.5 * np.eye(2), atol=1e-15)


def test_density_matrix_one_efold():
    rho = relative_density_matrix(replace(at_t2(), coherence_factor=math.exp(-1)))
    assert abs(rho.rho12) == pytest.approx(0.18393972058572117, rel=1e-12)


def test_density_matrix_needs_t2():
    with pytest.raises(ValueError):
        relative_density_matrix(initial_state(0.5))


def test_density_matrix_rejects_non_hermitian():
    with pytest.raises(ValueError):
        InterWorldDensityMatrix(0.5, 0.1j, 0.1j, 0.5)


@given(splits, unit)
def test_density_matrix_invariants(split, coherence):
    rho = relative_density_matrix(replace(at_t2(split), coherence_factor=coherence))
    assert abs(rho.trace - 1) < 1e-12
    assert abs(rho.rho21 - rho.rho12.conjugate()) < 1e-12
    assert abs(rho.rho12) <= math.sqrt(rho.rho11.real * rho.rho22.real) + 1e-15


@pytest.mark.parametrize("split, expected", [(0.5, (0.5, 0.5)), (1.0, (1.0, 0.0)), (0.25, (0.25, 0.75))])
def test_branch_probabilities(split, expected):
    assert branch_probabilities(initial_state(split)) == pytest.approx(expected, abs=1e-15)


@given(splits)
def test_branch_probabilities_normalized(split):
    assert abs(sum(branch_probabilities(at_t2(split))) - 1) < 1e-12


def test_energy_ledger_without_pulse_is_zero():
    led = energy_ledger(at_t3(), HYPERFINE_OMEGA)
    assert (led.branch1_field_energy_change, led.branch2_field_energy_change) == (0.0, 0.0)
    assert (led.branch1_ion_energy, led.branch2_ion_energy, led.universe_balance) == (0.0, 0.0, 0.0)


def test_energy_ledger_mwi_pulse_balances():
    led = energy_ledger(at_t3(p1=1.0, p2=1.0, pulsed=Branch.BRANCH1), HYPERFINE_OMEGA)
    quantum = HBAR * HYPERFINE_OMEGA
    assert led.branch1_ion_energy == led.branch2_ion_energy == pytest.approx(quantum)
    # branch 1 pays for the excitation seen in both worlds
    assert led.branch1_field_energy_change == pytest.approx(-2 * quantum)
    assert led.branch2_field_energy_change == 0.0
    assert led.relative_balance < 1e-12


def test_energy_ledger_partial_cross_world_excitation():
    # Independent bookkeeping: the receiver's gain must equal the sender's extra loss.
    p = 0.7016
    led = energy_ledger(at_t3(p1=1.0, p2=p, pulsed=Branch.BRANCH1), HYPERFINE_OMEGA)
    quantum = HBAR * HYPERFINE_OMEGA
    assert led.branch2_ion_energy == pytest.approx(quantum * p)
    assert 0.5 * led.branch1_field_energy_change + 0.5 * quantum == pytest.approx(-0.5 * quantum * p)
    assert led.relative_balance < 1e-12


def test_energy_ledger_requires_sender_and_t3():
    with pytest.raises(ValueError):
        energy_ledger(at_t3(p1=1.0), HYPERFINE_OMEGA)
    with pytest.raises(ValueError):
        energy_ledger(at_t2(), HYPERFINE_OMEGA)


@given(splits.filter(lambda s: 0.01 < s < 0.99), unit, unit, st.sampled_from(list(Branch)))
def test_energy_balance_any_sender(split, p1, p2, sender):
    led = energy_ledger(at_t3(split, p1, p2, pulsed=sender), HYPERFINE_OMEGA)
    assert led.relative_balance < 1e-12
