"""Resonant microwave drive of the hyperfine transition."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .constants import DIPOLE_MU_B_OVER_C, HBAR, HYPERFINE_OMEGA
from .quantum import Branch

_SQRT2 = math.sqrt(2.0)
PI_PULSE_TOL = 1e-9


class PulseKind(enum.Enum):
    PI = "pi"
    MWI_PI = "mwi_pi"
    CUSTOM = "custom"


class ExcitationModel(enum.Enum):
    ONE_AND_ONLY_ONE = "one-interaction"
    FEEDBACK = "feedback"


@dataclass(frozen=True)
class PulseSpec:
    """A rectangular resonant pulse.

    For ``PI`` pulses ``field * duration * dipole == pi * hbar``; an
    ``MWI_PI`` pulse has the same field but lasts sqrt(2) times longer, which
    compensates for the drive being present in only one of two equal worlds.
    """

    duration: float  # s
    field_strength: float  # V/m
    dipole_moment: float = DIPOLE_MU_B_OVER_C  # C m
    carrier_frequency_omega: float = HYPERFINE_OMEGA  # s^-1
    kind: PulseKind = PulseKind.CUSTOM
    applied_in_branch: Branch | None = Branch.BRANCH1

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration >= 0):
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        if not (math.isfinite(self.field_strength) and self.field_strength >= 0):
            raise ValueError(f"field_strength must be >= 0, got {self.field_strength}")
        if not self.dipole_moment > 0:
            raise ValueError("dipole_moment must be positive")
        if not self.carrier_frequency_omega > 0:
            raise ValueError("carrier_frequency_omega must be positive")
        if self.kind is not PulseKind.CUSTOM:
            area = self.field_strength * self.pi_time * self.dipole_moment
            if abs(area - math.pi * HBAR) > PI_PULSE_TOL * math.pi * HBAR:
                raise ValueError(f"{self.kind.value} pulse does not satisfy E*t_p*dipole = pi*hbar")

    @property
    def pi_time(self) -> float:
        """Duration of an ordinary pi pulse at this field (for PI/MWI_PI kinds)."""
        return self.duration / _SQRT2 if self.kind is PulseKind.MWI_PI else self.duration

    @property
    def rabi_frequency(self) -> float:
        """``nu = dipole * E / (2 sqrt(2) hbar)``."""
        return self.dipole_moment * self.field_strength / (2 * _SQRT2 * HBAR)

    @property
    def rabi_angle(self) -> float:
        return self.rabi_frequency * self.duration

    @property
    def excitation_rate(self) -> float:
        """Decoherence rate caused by absorption, one e-fold per MWI pi pulse."""
        return 2 * self.rabi_frequency / math.pi


@dataclass(frozen=True)
class ExcitationResult:
    probability_p: float
    damping_D: float
    model: ExcitationModel

    def __post_init__(self):
        if not 0.0 <= self.probability_p <= 1.0:
            raise ValueError("probability_p outside [0, 1]")
        if not 0.0 <= self.damping_D <= 1.0:
            raise ValueError("damping_D outside [0, 1]")


def pi_pulse_field(t_p: float, dipole: float = DIPOLE_MU_B_OVER_C) -> float:
    """Field amplitude that inverts the transition in ``t_p`` (orthodox pi pulse)."""
    if not t_p > 0:
        raise ValueError(f"t_p must be positive, got {t_p}")
    if not dipole > 0:
        raise ValueError(f"dipole must be positive, got {dipole}")
    return math.pi * HBAR / (t_p * dipole)


def make_pi_pulse(t_p, dipole=DIPOLE_MU_B_OVER_C, omega=HYPERFINE_OMEGA, branch=Branch.BRANCH1):
    return PulseSpec(t_p, pi_pulse_field(t_p, dipole), dipole, omega, PulseKind.PI, branch)


def make_mwi_pulse(t_p, dipole=DIPOLE_MU_B_OVER_C, omega=HYPERFINE_OMEGA, branch=Branch.BRANCH1):
    """Pi-pulse field held for ``sqrt(2) * t_p``."""
    return PulseSpec(_SQRT2 * t_p, pi_pulse_field(t_p, dipole), dipole, omega, PulseKind.MWI_PI, branch)


def rabi_probability(pulse: PulseSpec) -> float:
    return math.sin(pulse.rabi_angle) ** 2


def excitation_damping(pulse: PulseSpec) -> float:
    """Overlap damping from absorption during the pulse.

    The exponent counts absorbed photons and grows linearly with the pulse
    area, normalized to exactly one for an MWI pi pulse.
    """
    return math.exp(-pulse.excitation_rate * pulse.duration)


def coherent_rabi_angle(nu: float, rate: float, duration: float, initial_coherence: float = 1.0) -> float:
    """``integral_0^T nu * c0 * exp(-rate t) dt`` in closed form."""
    if rate < 0:
        raise ValueError("rate must be >= 0")
    if math.isinf(rate):
        return 0.0
    x = rate * duration
    # (1 - e^-x)/x, with its series where the quotient loses precision
    weight = 1 - x / 2 + x * x / 6 if x < 1e-6 else -math.expm1(-x) / x
    return nu * initial_coherence * duration * weight


def one_interaction_excitation(pulse: PulseSpec) -> ExcitationResult:
    """Excitation when every absorption acts on a still fully coherent ion."""
    return ExcitationResult(rabi_probability(pulse), excitation_damping(pulse), ExcitationModel.ONE_AND_ONLY_ONE)


def feedback_excitation(
    pulse: PulseSpec,
    decoherence_rate: float | None = None,
    initial_coherence: float = 1.0,
) -> ExcitationResult:
    """Cross-world excitation when each absorption sees an already damped overlap.

    The Rabi angle accumulated in the other world is weighted by the current
    coherence ``D(t) = c0 * exp(-rate t)``. ``decoherence_rate`` defaults to
    the absorption rate of the pulse itself; pass 0 to recover the undamped
    Rabi result or add background rates on top.
    """
    rate = pulse.excitation_rate if decoherence_rate is None else decoherence_rate
    theta = coherent_rabi_angle(pulse.rabi_frequency, rate, pulse.duration, initial_coherence)
    damping = initial_coherence * (math.exp(-rate * pulse.duration) if math.isfinite(rate) else 0.0)
    if pulse.duration == 0:
        damping = initial_coherence
    return ExcitationResult(math.sin(theta) ** 2, damping, ExcitationModel.FEEDBACK)


def excite(pulse: PulseSpec, model: ExcitationModel) -> ExcitationResult:
    if model is ExcitationModel.FEEDBACK:
        return feedback_excitation(pulse)
    return one_interaction_excitation(pulse)
