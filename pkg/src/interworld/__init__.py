"""Branching-world decoherence and cross-world Rabi excitation of a trapped ion."""

from .decoherence import (
    NO_DECOHERENCE,
    DecoherenceBudget,
    ScatteringChannel,
    ScatteringEvent,
    TrapConfig,
    damping_at_time,
    decoherence_budget,
    decoherence_time,
    microwave_elastic_decoherence_time,
    microwave_flux,
    mixing_timescale,
    phase_kick_summary,
    repeated_damping,
    rest_gas_decoherence_time,
    rest_gas_flux,
    sample_phase_kick_ensemble,
    sample_phase_kick_trajectory,
    single_collision_damping,
    trap_field_decoherence_time,
)
from .drive import (
    ExcitationModel,
    ExcitationResult,
    PulseKind,
    PulseSpec,
    excitation_damping,
    feedback_excitation,
    make_mwi_pulse,
    make_pi_pulse,
    one_interaction_excitation,
    pi_pulse_field,
    rabi_probability,
)
from .protocol import (
    BitChannelReport,
    ProtocolScenario,
    Readout,
    RunReport,
    ensemble_statistics,
    measure_ion,
    run_protocol,
    transmit_bits,
)
from .quantum import (
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
from .report import PaperTable, emit_report, reproduce_paper_table
from .scenario import parse_scenario, serialize_scenario

__version__ = "0.1.0"
