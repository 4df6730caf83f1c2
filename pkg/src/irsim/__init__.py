"""Simulation and reflection optimization for a target-mounted reflecting
surface shared between a legitimate and an unauthorized radar."""

from .arrays import (
    AnglePair,
    ArraySpec,
    composite_vector,
    composite_vector_kron,
    dft_codebook,
    matched_beamformer,
    steering_1d,
    steering_irs,
    steering_radar,
)
from .channel import (
    ChannelSet,
    LinkGain,
    ScenarioGeometry,
    build_channels,
    path_gain,
    sample_reference_phases,
)
from .config import ConfigError, ScenarioConfig
from .experiments import EXPERIMENT_IDS, SweepSpec, default_grid, emit, run_experiment
from .optimizer import (
    BudgetExceeded,
    Infeasible,
    NoNullAvailable,
    PddParams,
    PddResult,
    PddState,
    ProblemData,
    brute_force_oracle,
    build_problem,
    canonicalize,
    closed_form_lrs_only,
    closed_form_urs_null,
    dual_and_penalty_update,
    inner_theta_update,
    inner_vartheta_update,
    minimize_unit_modulus_quadratic,
    pdd_solve,
    pdd_solve_with_candidates,
    problem_constraint,
    problem_objective,
)
from .power import (
    PowerReport,
    ReflectionVector,
    bilinear_link_power,
    irs_received_powers,
    link_power,
    overlap_power,
    power_report,
)
from .protocol import (
    CpiResult,
    EstimationError,
    ProtocolMode,
    default_rcs,
    no_irs_baseline_power,
    random_phase_baseline,
    run_cpi,
)
from .waveform import CaseSegments, PulseSpec, TimingPlan, pulse_sample, segment_pri

__version__ = "0.1.0"
