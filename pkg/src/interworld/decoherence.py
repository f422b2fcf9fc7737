"""Collision-induced decoherence of the trapped ion.

Every elastic scattering multiplies the overlap of the ion's relative states
by a damping factor close to one. Composing many such collisions gives an
exponential decay at rate ``sigma * flux``. The module also provides the
decoherence-time budget of a concrete trap (rest gas, microwave photons,
confining fields) and a Monte Carlo sampler of the random phase kicks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .constants import C_LIGHT, EPSILON0, H, HBAR, K_B

# Decoherence time of a channel with vanishing rate.
NO_DECOHERENCE = math.inf

# Largest sigma/(4 pi r^2) for which the first-order damping is trusted.
DILUTE_LIMIT = 0.1

DEFAULT_KICK_RADIUS = 1e-3  # m

# Collisions per interval above which phase kicks are aggregated (see
# sample_phase_kick_ensemble).
EXPLICIT_KICK_LIMIT = 256

_MP_DPS = 50


@dataclass(frozen=True)
class ScatteringEvent:
    """One elastic collision: amplitude f, observation radius r, phase kick."""

    amplitude_f: float
    radius_r: float
    phase_kick: float

    def __post_init__(self):
        if not self.radius_r > 0:
            raise ValueError("radius_r must be positive")
        if self.amplitude_f < 0:
            raise ValueError("amplitude_f must be nonnegative")
        if not (self.amplitude_f / self.radius_r) ** 2 < 1:
            raise ValueError("f^2/r^2 must be < 1 for a dilute gas")

    @property
    def overlap_factor(self) -> complex:
        """Factor applied to the complex overlap <A_1|A_2> by this collision."""
        x = (self.amplitude_f / self.radius_r) ** 2
        return (1 + x * complex(math.cos(self.phase_kick), math.sin(self.phase_kick))) / (1 + x)


@dataclass(frozen=True)
class ScatteringChannel:
    name: str
    cross_section: float  # m^2
    flux: float  # m^-2 s^-1

    def __post_init__(self):
        if self.cross_section < 0 or self.flux < 0:
            raise ValueError(f"channel {self.name!r}: cross section and flux must be >= 0")

    @property
    def rate(self) -> float:
        return self.cross_section * self.flux


@dataclass(frozen=True)
class TrapConfig:
    """Ion trap and vacuum parameters.

    ``photon_cross_section`` is the angle-averaged Thomson cross section of
    the ion, shared by the microwave and confining-field channels.
    """

    temperature: float  # K
    pressure: float  # Pa
    gas_molecule_mass: float  # kg
    elastic_cross_section_sigma_c: float  # m^2
    confining_field_E_c: float  # V/m
    field_variability_fraction_f_v: float
    field_variability_frequency: float  # s^-1
    trap_extension_d: float  # m
    ion_mass: float  # kg
    photon_cross_section: float = 5.2e-40  # m^2

    # Zero switches the corresponding decoherence channel off.
    _MAY_BE_ZERO = ("pressure", "elastic_cross_section_sigma_c", "field_variability_fraction_f_v", "photon_cross_section")

    def __post_init__(self):
        for name, value in vars(self).items():
            ok = value >= 0 if name in self._MAY_BE_ZERO else value > 0
            if not (math.isfinite(value) and ok):
                raise ValueError(f"TrapConfig.{name} must be positive and finite, got {value}")
        if self.field_variability_fraction_f_v > 1:
            raise ValueError("field_variability_fraction_f_v must be <= 1")


@dataclass(frozen=True)
class BudgetEntry:
    name: str
    decoherence_time: float  # s, or NO_DECOHERENCE
    pulse_only: bool = False  # active only while the drive is on

    @property
    def rate(self) -> float:
        return 1.0 / self.decoherence_time


@dataclass(frozen=True)
class DecoherenceBudget:
    entries: tuple[BudgetEntry, ...]
    combined_time: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "combined_time", combine_times(e.decoherence_time for e in self.entries))

    @property
    def rate(self) -> float:
        """Total decoherence rate while the drive is on."""
        return math.fsum(e.rate for e in self.entries)

    @property
    def idle_rate(self) -> float:
        """Total rate while no pulse is applied."""
        return math.fsum(e.rate for e in self.entries if not e.pulse_only)

    def time_of(self, name: str) -> float:
        for e in self.entries:
            if e.name == name:
                return e.decoherence_time
        raise KeyError(name)


def combine_times(times) -> float:
    """Harmonic combination 1/sum(1/t_i); infinite entries contribute nothing."""
    rate = math.fsum(1.0 / t for t in times)
    return NO_DECOHERENCE if rate == 0 else 1.0 / rate


def single_collision_damping(sigma: float, radius: float) -> mpmath.mpf:
    """Overlap damping ``1 - sigma/(4 pi r^2)`` for one isotropic collision.

    The deficit from one is routinely below float64 resolution (1e-13 or
    less at millimetre radii), so the value is returned as an extended
    precision ``mpmath.mpf``; ``float()`` it for display.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    with mpmath.workdps(_MP_DPS):
        x = mpmath.mpf(sigma) / (4 * mpmath.pi * mpmath.mpf(radius) ** 2)
        if x >= DILUTE_LIMIT:
            raise ValueError(
                f"sigma/(4 pi r^2) = {float(x):.3g} >= {DILUTE_LIMIT}: dilute-gas approximation violated"
            )
        return 1 - x


def repeated_damping(d_single, n) -> float:
    """Damping after ``n`` independent collisions, ``d_single**n``."""
    with mpmath.workdps(_MP_DPS):
        d = mpmath.mpf(d_single)
        if not 0 <= d <= 1:
            raise ValueError(f"single-collision damping must lie in [0, 1], got {d_single}")
        if n == 0:
            return 1.0
        return float(mpmath.power(d, n))


def collisions_in(radius: float, flux: float, t: float) -> int:
    """Number of particles crossing a sphere of radius r in time t."""
    return round(4 * math.pi * radius**2 * flux * t)


def damping_at_time(channel: ScatteringChannel, t: float) -> float:
    if t < 0:
        raise ValueError("t must be >= 0")
    return math.exp(-channel.rate * t)


def decoherence_time(channel: ScatteringChannel) -> float:
    """``1/(sigma*flux)``, or ``NO_DECOHERENCE`` for a silent channel."""
    rate = channel.rate
    return NO_DECOHERENCE if rate == 0 else 1.0 / rate


def mean_thermal_speed(temperature: float, mass: float) -> float:
    return math.sqrt(8 * K_B * temperature / (math.pi * mass))


def rest_gas_flux(config: TrapConfig) -> float:
    """Ideal-gas number density times mean thermal speed of the gas."""
    density = config.pressure / (K_B * config.temperature)
    return density * mean_thermal_speed(config.temperature, config.gas_molecule_mass)


def rest_gas_decoherence_time(config: TrapConfig) -> float:
    return decoherence_time(
        ScatteringChannel("rest gas", config.elastic_cross_section_sigma_c, rest_gas_flux(config))
    )


def microwave_flux(field_E: float, omega: float) -> float:
    """Photon flux ``eps0 c E^2 / (hbar omega)`` of a field of amplitude E."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if field_E < 0:
        raise ValueError("field_E must be >= 0")
    return EPSILON0 * C_LIGHT * field_E**2 / (HBAR * omega)


def microwave_elastic_decoherence_time(dipole: float, t_p: float, sigma: float, omega: float) -> float:
    """Decoherence time from elastic scattering of a pi-pulse microwave field.

    Closed form of ``1/(sigma * flux(E_pi(t_p), omega))``, which grows as the
    square of both ``t_p`` and ``dipole``.
    """
    for name, v in (("dipole", dipole), ("t_p", t_p), ("sigma", sigma), ("omega", omega)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return t_p**2 * dipole**2 * omega / (EPSILON0 * C_LIGHT * math.pi**2 * HBAR * sigma)


def trap_field_decoherence_time(sigma: float, omega_var: float, E_c: float, f_v: float) -> float:
    """Worst-case decoherence from the residual time variation of the trap field."""
    for name, v in (("sigma", sigma), ("omega_var", omega_var), ("E_c", E_c), ("f_v", f_v)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return HBAR * omega_var / (EPSILON0 * C_LIGHT * (f_v * E_c) ** 2 * sigma)


def decoherence_budget(config: TrapConfig, pulse=None) -> DecoherenceBudget:
    """Decoherence times of the rest-gas, microwave and trap-field channels.

    The microwave entry uses the field actually applied by ``pulse`` and is
    flagged ``pulse_only``; with no pulse it is ``NO_DECOHERENCE``. The trap
    field is treated as a photon flux at the variability frequency, which is
    the closed form of :func:`trap_field_decoherence_time`.
    """
    sigma = config.photon_cross_section
    if pulse is None:
        microwave = NO_DECOHERENCE
    else:
        microwave = decoherence_time(
            ScatteringChannel(
                "microwave elastic", sigma, microwave_flux(pulse.field_strength, pulse.carrier_frequency_omega)
            )
        )
    residual_field = config.field_variability_fraction_f_v * config.confining_field_E_c
    return DecoherenceBudget(
        (
            BudgetEntry("rest gas", rest_gas_decoherence_time(config)),
            BudgetEntry("microwave elastic", microwave, pulse_only=True),
            BudgetEntry(
                "trap field",
                decoherence_time(
                    ScatteringChannel(
                        "trap field", sigma, microwave_flux(residual_field, config.field_variability_frequency)
                    )
                ),
            ),
        )
    )


def mixing_timescale(d_coh: float, trap_extension_d: float, ion_mass: float) -> float:
    """Time after which excited and unexcited phase-space regions overlap.

    ``d_coh * m / dp`` with the momentum spread ``dp = h/d`` of the trap.
    """
    for name, v in (("d_coh", d_coh), ("trap_extension_d", trap_extension_d), ("ion_mass", ion_mass)):
        if v < 0:
            raise ValueError(f"{name} must be nonnegative, got {v}")
    return d_coh * trap_extension_d * ion_mass / H


def _log_kick_variance(x: float) -> float:
    # Var of log|1 + x e^{i phi}| for uniform phi: sum_m x^(2m) / (2 m^2).
    total, term, m = 0.0, 1.0, 1
    while True:
        term *= x * x
        inc = term / (2 * m * m)
        total += inc
        if inc < 1e-18 * total or m > 200:
            return total
        m += 1


def kick_rate(channel: ScatteringChannel, radius: float) -> float:
    """Poisson collision rate whose mean complex damping decays as exp(-sigma phi t)."""
    x = channel.cross_section / (4 * math.pi * radius**2)
    return channel.rate * (1 + x) / x


def sample_phase_kick_ensemble(
    channel: ScatteringChannel,
    times,
    n_trajectories: int,
    radius: float = DEFAULT_KICK_RADIUS,
    seed: int | None = None,
) -> np.ndarray:
    """|coherence| of ``n_trajectories`` independent kick histories at ``times``.

    Collisions arrive as a Poisson process at :func:`kick_rate`; each one
    multiplies the complex overlap by ``(1 + x e^{i dphi})/(1 + x)`` with
    ``x = sigma/(4 pi r^2)`` and ``dphi`` uniform. Only the magnitude is
    tracked, as a sum of ``log|1 + x e^{i dphi}|`` terms. When an interval
    holds more than ``EXPLICIT_KICK_LIMIT`` collisions the sum is replaced by
    a normal draw with the exact mean (zero) and variance of the summands;
    neglected higher cumulants are O(x^4) per collision.

    Returns an array of shape ``(n_trajectories, len(times))``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and nondecreasing")
    rng = np.random.default_rng(seed)
    out = np.ones((n_trajectories, len(times)))
    if channel.rate == 0:
        return out
    x = channel.cross_section / (4 * math.pi * radius**2)
    if x >= DILUTE_LIMIT:
        raise ValueError(f"sigma/(4 pi r^2) = {x:.3g} >= {DILUTE_LIMIT}: dilute-gas approximation violated")
    rate = kick_rate(channel, radius)
    log_shrink = math.log1p(x)
    var = _log_kick_variance(x)

    log_c = np.zeros(n_trajectories)
    prev = 0.0
    for j, t in enumerate(times):
        dt = t - prev
        prev = t
        if dt > 0:
            counts = rng.poisson(rate * dt, size=n_trajectories)
            small = counts <= EXPLICIT_KICK_LIMIT
            big = ~small
            kicks = np.zeros(n_trajectories)
            n_small = int(counts[small].sum())
            if n_small:
                phases = rng.uniform(0.0, 2 * math.pi, size=n_small)
                terms = 0.5 * np.log1p(2 * x * np.cos(phases) + x * x)
                owner = np.repeat(np.flatnonzero(small), counts[small])
                kicks += np.bincount(owner, weights=terms, minlength=n_trajectories)
            if big.any():
                kicks[big] = rng.normal(0.0, np.sqrt(counts[big] * var))
            log_c += kicks - counts * log_shrink
        out[:, j] = np.exp(log_c)
    return out


def sample_phase_kick_trajectory(
    channel: ScatteringChannel,
    radius: float = DEFAULT_KICK_RADIUS,
    duration: float = 1.0,
    seed: int | None = None,
    n_points: int = 101,
) -> list[tuple[float, float]]:
    """One seeded trajectory of (time, |coherence|) on an even grid."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return [(0.0, 1.0)]
    times = np.linspace(0.0, duration, n_points)
    coh = sample_phase_kick_ensemble(channel, times, 1, radius=radius, seed=seed)[0]
    return list(zip(times.tolist(), coh.tolist()))


@dataclass(frozen=True)
class KickEnsembleSummary:
    """Ensemble mean of |coherence| against the closed-form exp(-sigma phi t)."""

    times: tuple
    mean: tuple
    std: tuple
    n_trajectories: int
    closed_form: tuple

    @property
    def stderr(self) -> tuple:
        return tuple(s / math.sqrt(self.n_trajectories) for s in self.std)

    @property
    def z_scores(self) -> tuple:
        return tuple(
            0.0 if se == 0 else (m - c) / se for m, c, se in zip(self.mean, self.closed_form, self.stderr)
        )


# Checkpoints in units of the decoherence time.
KICK_CHECKPOINTS = (0.25, 0.5, 1.0, 2.0, 4.0)


def phase_kick_summary(
    channel: ScatteringChannel,
    n_trajectories: int,
    seed: int | None = None,
    radius: float = DEFAULT_KICK_RADIUS,
    checkpoints=KICK_CHECKPOINTS,
) -> KickEnsembleSummary:
    """Sample an ensemble at ``checkpoints`` decoherence times and summarize it."""
    t_dec = decoherence_time(channel)
    if math.isinf(t_dec):
        raise ValueError("channel does not decohere")
    times = np.asarray(checkpoints, dtype=float) * t_dec
    samples = sample_phase_kick_ensemble(channel, times, n_trajectories, radius=radius, seed=seed)
    return KickEnsembleSummary(
        times=tuple(times.tolist()),
        mean=tuple(samples.mean(axis=0).tolist()),
        std=tuple(samples.std(axis=0, ddof=1).tolist()) if n_trajectories > 1 else (0.0,) * len(times),
        n_trajectories=n_trajectories,
        closed_form=tuple(damping_at_time(channel, t) for t in times),
    )
