"""Monte Carlo simulation of the two-observer signalling protocol.

A photon passes a polarizer; the world in which it is detected (the sender)
drives the trapped ion, the other world (the receiver) waits and reads out the
hyperfine state. Every trial shares the same deterministic physics, so the
per-trial work is a single Bernoulli readout drawn from a generator seeded by
``(scenario.seed, trial index)``. Trials can therefore run in any order or in
parallel and still give identical reports.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy import stats

from .constants import HYPERFINE_OMEGA
from .decoherence import DecoherenceBudget, TrapConfig, decoherence_budget
from .drive import ExcitationModel, PulseSpec, coherent_rabi_angle, rabi_probability
from .quantum import (
    DEFAULT_STAGE_TIMES,
    Branch,
    BranchedState,
    EnergyLedger,
    Stage,
    TimelineStage,
    advance_stage,
    energy_ledger,
    initial_state,
)

# Warn when the pulse lasts longer than this fraction of the decoherence time.
WINDOW_WARN_FRACTION = 0.1
CONFIDENCE = 0.95


class Readout(enum.Enum):
    F0 = "F0"
    F1 = "F1"


class DecoherenceWindowWarning(UserWarning):
    """The excitation does not fit well inside the decoherence window."""


@dataclass(frozen=True)
class ProtocolScenario:
    trap: TrapConfig
    pulse_policy: dict = field(default_factory=dict)  # Branch -> PulseSpec | None
    stage_times: dict = field(default_factory=lambda: dict(DEFAULT_STAGE_TIMES))
    wait_before_readout: float = 1.0
    n_trials: int = 1000
    seed: int = 0
    model: ExcitationModel = ExcitationModel.FEEDBACK
    photon_split: float = 0.5
    hyperfine_frequency: float = HYPERFINE_OMEGA

    def __post_init__(self):
        object.__setattr__(self, "pulse_policy", {b: self.pulse_policy.get(b) for b in Branch})
        object.__setattr__(self, "stage_times", {Stage(k): float(v) for k, v in self.stage_times.items()})
        missing = set(DEFAULT_STAGE_TIMES) - set(self.stage_times)
        if missing:
            raise ValueError(f"stage_times missing {sorted(s.name for s in missing)}")
        if Stage.T3 in self.stage_times:
            raise ValueError("T3 is derived from the pulse and wait time, do not set it")
        times = [self.stage_times[s] for s in sorted(self.stage_times)]
        if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"stage_times must be >= 0 and strictly increasing, got {times}")
        if not (math.isfinite(self.wait_before_readout) and self.wait_before_readout > 0):
            raise ValueError("wait_before_readout must be positive")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if not 0.0 <= self.photon_split <= 1.0:
            raise ValueError("photon_split must lie in [0, 1]")
        if not self.hyperfine_frequency > 0:
            raise ValueError("hyperfine_frequency must be positive")
        pulsing = [b for b, p in self.pulse_policy.items() if p is not None]
        if len(pulsing) > 1:
            raise ValueError("only one world may drive the ion")
        for b in pulsing:
            if self.pulse_policy[b].applied_in_branch is not b:
                raise ValueError(f"pulse under {b.value} is marked for {self.pulse_policy[b].applied_in_branch}")

    @property
    def sender(self) -> Branch | None:
        for b, p in self.pulse_policy.items():
            if p is not None:
                return b
        return None

    @property
    def receiver(self) -> Branch:
        return self.sender.other if self.sender else Branch.BRANCH2

    @property
    def pulse(self) -> PulseSpec | None:
        return self.pulse_policy[self.sender] if self.sender else None


@dataclass(frozen=True)
class MeasurementRecord:
    trial: int
    branch: Branch
    readout_state: Readout
    coherence_at_readout: float

    def __post_init__(self):
        if not 0.0 <= self.coherence_at_readout <= 1.0:
            raise ValueError("coherence_at_readout outside [0, 1]")


@dataclass(frozen=True)
class RateEstimate:
    """Binomial fraction with its Wilson score interval."""

    successes: int
    trials: int
    lower: float
    upper: float

    @property
    def rate(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class TrialPlan:
    """Deterministic physics shared by all trials of a scenario."""

    final_state: BranchedState
    cross_world_probability: float
    coherence_at_readout: float
    budget: DecoherenceBudget
    excitation_to_decoherence_ratio: float


@dataclass(frozen=True)
class RunReport:
    scenario: ProtocolScenario
    records: tuple
    plan: TrialPlan
    energy: EnergyLedger

    def __post_init__(self):
        if len(self.records) != self.scenario.n_trials:
            raise ValueError("record count does not match n_trials")

    @cached_property
    def cross_world_excitation_rate(self) -> RateEstimate:
        return wilson_estimate(sum(r.readout_state is Readout.F1 for r in self.records), len(self.records))

    @property
    def budget(self) -> DecoherenceBudget:
        return self.plan.budget


@dataclass(frozen=True)
class BitChannelReport:
    sent: str
    received: str
    bit_error_rate: float

    def __post_init__(self):
        if len(self.sent) != len(self.received):
            raise ValueError("sent and received must have equal length")
        if not 0.0 <= self.bit_error_rate <= 1.0:
            raise ValueError("bit_error_rate outside [0, 1]")


def wilson_estimate(successes: int, trials: int, confidence: float = CONFIDENCE) -> RateEstimate:
    if trials < 1:
        raise ValueError("need at least one trial")
    ci = stats.binomtest(successes, trials).proportion_ci(confidence, method="wilson")
    # Pin the closed ends; the score formula leaves them a rounding error away.
    lower = 0.0 if successes == 0 else max(0.0, ci.low)
    upper = 1.0 if successes == trials else min(1.0, ci.high)
    return RateEstimate(successes, trials, lower, upper)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one trial, keyed by (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def measure_ion(probability_p: float, rng: np.random.Generator) -> Readout:
    """Fluorescence readout. The ion is left fully decohered (coherence 0)."""
    if not 0.0 <= probability_p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {probability_p}")
    return Readout.F1 if rng.random() < probability_p else Readout.F0


def plan_trial(scenario: ProtocolScenario) -> TrialPlan:
    """Evolve the branch state t0 -> t3 and the cross-world excitation probability.

    Background decoherence starts at t2. Between t2 and the pulse and during
    the wait only the idle channels act; while the pulse is on the microwave
    channel adds to them. Under the feedback model the absorption rate of the
    pulse itself also damps the coherence that carries the excitation across.
    """
    times = scenario.stage_times
    state = initial_state(scenario.photon_split, times[Stage.T0])
    for stage in (Stage.T1, Stage.T2, Stage.EXCITATION_WINDOW):
        state = advance_stage(state, TimelineStage(stage, times[stage]))

    pulse = scenario.pulse
    budget = decoherence_budget(scenario.trap, pulse)
    idle, during = budget.idle_rate, budget.rate
    c0 = math.exp(-idle * (times[Stage.EXCITATION_WINDOW] - times[Stage.T2]))

    if pulse is None:
        p_local = p_cross = 0.0
        c_end = c0
        duration = 0.0
        ratio = 0.0
    else:
        duration = pulse.duration
        absorption = pulse.excitation_rate
        rate = during + absorption if scenario.model is ExcitationModel.FEEDBACK else during
        theta = coherent_rabi_angle(pulse.rabi_frequency, rate, duration, c0)
        p_cross = math.sin(theta) ** 2
        p_local = rabi_probability(pulse)
        c_end = c0 * math.exp(-(during + absorption) * duration)
        ratio = duration / budget.combined_time

    wait_damping = math.exp(-idle * scenario.wait_before_readout)
    p_cross *= wait_damping
    c_read = c_end * wait_damping

    amps = {scenario.sender: math.sqrt(p_local), scenario.receiver: math.sqrt(p_cross)}
    final = replace(
        advance_stage(
            state,
            TimelineStage(Stage.T3, times[Stage.EXCITATION_WINDOW] + duration + scenario.wait_before_readout),
        ),
        a1_excited_amp=complex(amps.get(Branch.BRANCH1, 0.0)),
        a2_excited_amp=complex(amps.get(Branch.BRANCH2, 0.0)),
        coherence_factor=c_read,
        pulsed_branch=scenario.sender,
    )
    return TrialPlan(final, p_cross, c_read, budget, ratio)


def _run_trials(scenario, plan, indices):
    return [
        MeasurementRecord(
            i,
            scenario.receiver,
            measure_ion(plan.cross_world_probability, trial_rng(scenario.seed, i)),
            plan.coherence_at_readout,
        )
        for i in indices
    ]


def run_protocol(scenario: ProtocolScenario, workers: int = 1, order=None) -> RunReport:
    """Run ``scenario.n_trials`` trials and collect the receiver's readouts.

    ``workers > 1`` spreads trials over a thread pool; ``order`` optionally
    permutes the trial execution order. Neither changes the report.
    """
    plan = plan_trial(scenario)
    if plan.excitation_to_decoherence_ratio >= WINDOW_WARN_FRACTION:
        warnings.warn(
            f"pulse duration is {plan.excitation_to_decoherence_ratio:.3g} of the decoherence time",
            DecoherenceWindowWarning,
            stacklevel=2,
        )
    indices = list(range(scenario.n_trials)) if order is None else list(order)
    if sorted(indices) != list(range(scenario.n_trials)):
        raise ValueError("order must be a permutation of the trial indices")
    if workers > 1:
        chunks = [indices[k::workers] for k in range(workers)]
        with ThreadPoolExecutor(workers) as pool:
            records = [r for chunk in pool.map(lambda c: _run_trials(scenario, plan, c), chunks) for r in chunk]
    else:
        records = _run_trials(scenario, plan, indices)
    records.sort(key=lambda r: r.trial)
    return RunReport(
        scenario=scenario,
        records=tuple(records),
        plan=plan,
        energy=energy_ledger(plan.final_state, scenario.hyperfine_frequency),
    )


def transmit_bits(bits: str, scenario: ProtocolScenario) -> BitChannelReport:
    """Send ``bits`` with one ion per bit: '1' drives the ion, '0' does not."""
    if set(bits) - {"0", "1"}:
        raise ValueError("bits must contain only '0' and '1'")
    if not bits:
        return BitChannelReport("", "", 0.0)
    pulse = scenario.pulse
    if pulse is None:
        raise ValueError("scenario has no pulse to encode a 1")
    sender = scenario.sender
    p_one = plan_trial(scenario).cross_world_probability
    p_zero = plan_trial(replace(scenario, pulse_policy={sender: None})).cross_world_probability
    received = "".join(
        "1" if measure_ion(p_one if b == "1" else p_zero, trial_rng(scenario.seed, i)) is Readout.F1 else "0"
        for i, b in enumerate(bits)
    )
    errors = sum(a != b for a, b in zip(bits, received))
    return BitChannelReport(bits, received, errors / len(bits))


def ensemble_statistics(reports) -> RateEstimate:
    """Pool the receiver's F1 counts of several runs into one estimate."""
    reports = list(reports)
    if not reports:
        raise ValueError("need at least one report")
    k = sum(r.cross_world_excitation_rate.successes for r in reports)
    n = sum(r.cross_world_excitation_rate.trials for r in reports)
    return wilson_estimate(k, n)
