"""Branch-level bookkeeping of the photon/filter/laboratory/ion wavefunction.

The macroscopic environment states are never represented explicitly. After
branching they are orthogonal to extremely high precision, so each world is
reduced to a complex weight, and the ion's relative states ``|A_1>``,
``|A_2>`` to an excitation amplitude per branch plus one real coherence factor
multiplying their overlap.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace

from .constants import HBAR

NORM_TOL = 1e-12


class Stage(enum.IntEnum):
    T0 = 0
    T1 = 1
    T2 = 2
    EXCITATION_WINDOW = 3
    T3 = 4


class Branch(enum.Enum):
    BRANCH1 = "branch1"
    BRANCH2 = "branch2"

    @property
    def other(self) -> Branch:
        return Branch.BRANCH2 if self is Branch.BRANCH1 else Branch.BRANCH1


DEFAULT_STAGE_TIMES = {
    Stage.T0: 0.0,
    Stage.T1: 1e-6,
    Stage.T2: 2e-6,
    Stage.EXCITATION_WINDOW: 3e-6,
}


@dataclass(frozen=True)
class TimelineStage:
    tag: Stage
    time: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.time) and self.time >= 0):
            raise ValueError(f"stage time must be finite and >= 0, got {self.time}")


def check_amplitude(value: complex, name: str = "amplitude") -> complex:
    """Coerce to ``complex`` and reject NaN or infinite components."""
    z = complex(value)
    if not cmath.isfinite(z):
        raise ValueError(f"{name} must be finite, got {z}")
    return z


@dataclass(frozen=True)
class BranchedState:
    """Joint state of both worlds and the ion at one timeline stage.

    ``w1_amp``/``w2_amp`` are the world weights, ``a1_excited_amp`` and
    ``a2_excited_amp`` the amplitude of the excited hyperfine level in the ion
    state relative to each world, and ``coherence_factor`` the surviving
    fraction of the ideal overlap between the two relative states.
    ``pulsed_branch`` records which world drove the ion, if any; the energy
    ledger needs it to attribute absorbed photons.
    """

    stage: TimelineStage
    w1_amp: complex
    w2_amp: complex
    a1_excited_amp: complex = 0j
    a2_excited_amp: complex = 0j
    coherence_factor: float = 1.0
    pulsed_branch: Branch | None = None

    def __post_init__(self):
        for name in ("w1_amp", "w2_amp", "a1_excited_amp", "a2_excited_amp"):
            object.__setattr__(self, name, check_amplitude(getattr(self, name), name))
        norm = abs(self.w1_amp) ** 2 + abs(self.w2_amp) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"branch weights not normalized: |w1|^2+|w2|^2 = {norm!r}")
        if not 0.0 <= self.coherence_factor <= 1.0:
            raise ValueError(f"coherence_factor must lie in [0, 1], got {self.coherence_factor}")
        for name in ("a1_excited_amp", "a2_excited_amp"):
            if abs(getattr(self, name)) > 1.0 + NORM_TOL:
                raise ValueError(f"{name} exceeds unit magnitude")
        if self.stage.tag <= Stage.T2 and (self.a1_excited_amp or self.a2_excited_amp):
            raise ValueError("no excitation is possible before the excitation window")

    @property
    def excited_probabilities(self) -> tuple[float, float]:
        return abs(self.a1_excited_amp) ** 2, abs(self.a2_excited_amp) ** 2


@dataclass(frozen=True)
class InterWorldDensityMatrix:
    """Overlaps ``<A_i|A_j>`` of the ion's relative states in the world basis."""

    rho11: complex
    rho12: complex
    rho21: complex
    rho22: complex

    def __post_init__(self):
        for name in ("rho11", "rho12", "rho21", "rho22"):
            object.__setattr__(self, name, check_amplitude(getattr(self, name), name))
        if abs(self.rho21 - self.rho12.conjugate()) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.rho11.imag) > NORM_TOL or abs(self.rho22.imag) > NORM_TOL:
            raise ValueError("diagonal elements must be real")
        if self.rho11.real < -NORM_TOL or self.rho22.real < -NORM_TOL:
            raise ValueError("diagonal elements must be nonnegative")
        if abs(self.trace - 1.0) > NORM_TOL:
            raise ValueError(f"trace must be 1, got {self.trace!r}")

    @property
    def trace(self) -> float:
        return (self.rho11 + self.rho22).real

    def to_array(self):
        import numpy as np

        return np.array([[self.rho11, self.rho12], [self.rho21, self.rho22]], dtype=complex)


@dataclass(frozen=True)
class EnergyLedger:
    branch1_field_energy_change: float
    branch2_field_energy_change: float
    branch1_ion_energy: float
    branch2_ion_energy: float
    universe_balance: float
    scale: float = 0.0  # gross energy moved, for relative comparisons

    @property
    def relative_balance(self) -> float:
        return abs(self.universe_balance) / self.scale if self.scale else abs(self.universe_balance)


def initial_state(photon_split: float = 0.5, time: float = 0.0) -> BranchedState:
    """Product state at t0; ``photon_split`` is the transmission probability."""
    if not 0.0 <= photon_split <= 1.0:
        raise ValueError(f"photon_split must lie in [0, 1], got {photon_split}")
    return BranchedState(
        stage=TimelineStage(Stage.T0, time),
        w1_amp=complex(math.sqrt(photon_split)),
        w2_amp=complex(math.sqrt(1.0 - photon_split)),
    )


def advance_stage(state: BranchedState, next_stage: TimelineStage) -> BranchedState:
    """Move to the immediately following stage without touching any amplitude."""
    if next_stage.tag != state.stage.tag + 1:
        raise ValueError(f"cannot advance from {state.stage.tag.name} to {next_stage.tag.name}")
    if not next_stage.time > state.stage.time:
        raise ValueError(
            f"stage times must strictly increase ({state.stage.time} -> {next_stage.time})"
        )
    return replace(state, stage=next_stage)


def relative_density_matrix(state: BranchedState) -> InterWorldDensityMatrix:
    if state.stage.tag < Stage.T2:
        raise ValueError("relative states are defined from t2 onward")
    off = state.w1_amp * state.w2_amp.conjugate() * state.coherence_factor
    return InterWorldDensityMatrix(
        rho11=complex(abs(state.w1_amp) ** 2),
        rho12=off,
        rho21=off.conjugate(),
        rho22=complex(abs(state.w2_amp) ** 2),
    )


def branch_probabilities(state: BranchedState) -> tuple[float, float]:
    return abs(state.w1_amp) ** 2, abs(state.w2_amp) ** 2


def energy_ledger(state: BranchedState, hyperfine_frequency: float) -> EnergyLedger:
    """Energy bookkeeping of the hyperfine excitation across both worlds.

    The ion energy seen from each world is ``hbar*omega*p_i``. Every quantum
    of excitation, in either world, is paid for by the field of the world
    that drove the ion, so the weighted sum over worlds vanishes even though
    the receiving world alone gains energy.
    """
    if state.stage.tag != Stage.T3:
        raise ValueError("energy ledger is evaluated at t3")
    quantum = HBAR * hyperfine_frequency
    w1, w2 = branch_probabilities(state)
    p1, p2 = state.excited_probabilities
    ion1, ion2 = quantum * p1, quantum * p2
    weighted_ion = math.fsum([w1 * ion1, w2 * ion2])

    field1 = field2 = 0.0
    if weighted_ion:
        if state.pulsed_branch is None:
            raise ValueError("ion is excited but no branch applied a pulse")
        sender_weight = w1 if state.pulsed_branch is Branch.BRANCH1 else w2
        if sender_weight == 0.0:
            raise ValueError("the pulsing branch carries zero weight")
        absorbed = -weighted_ion / sender_weight
        if state.pulsed_branch is Branch.BRANCH1:
            field1 = absorbed
        else:
            field2 = absorbed

    balance = math.fsum([w1 * field1, w2 * field2, w1 * ion1, w2 * ion2])
    return EnergyLedger(
        branch1_field_energy_change=field1,
        branch2_field_energy_change=field2,
        branch1_ion_energy=ion1,
        branch2_ion_energy=ion2,
        universe_balance=balance,
        scale=weighted_ion,
    )
