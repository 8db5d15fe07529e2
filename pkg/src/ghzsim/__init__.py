"""Dissipative GHZ-state preparation in a cavity: models, dynamics, scenarios.

Three ingredients make up the scheme: a cavity-assisted Raman stage that
pumps the three-atom register out of every unequal-superposition state
(quantum-Zeno regime, unequal ground Stark shifts), a Rydberg-antiblockade
drive that depletes the remaining product component, and an optional
parity-feedback step.  This package builds the full Lindblad models, the
reduced effective models, integrates or solves them for steady states, and
reproduces the headline numbers via the `ghzsim` command line.
"""

from .hilbert import (
    DensityMatrix,
    SpaceSpec,
    SparseOperator,
    StateVector,
    build_space,
    cavity_annihilation,
    commutator,
    embed_site_operator,
    expectation,
    ket_bra,
    ket_from_labels,
    projector,
    site_dyad,
    trace_out_cavity,
)
from .model import (
    CollapseChannel,
    ModelParams,
    build_collapse_channels,
    build_hk,
    build_hr,
    build_stark_compensation,
    named_states,
    rydberg_u_from_geometry,
)
from .effective import (
    AdiabaticElimination,
    RotatingTerm,
    SymmetricAmplitudes,
    TimeDependentHamiltonian,
    ZenoDecomposition,
    adiabatic_eliminate,
    amplitude_rhs,
    build_effective_full_model,
    build_effective_zpump,
    light_shift_diagonal,
    symmetric_hr_4x4,
    zeno_decompose,
)
from .dynamics import (
    IntegrationError,
    IntegratorControls,
    LindbladModel,
    SteadyStateCriterion,
    SteadyStateResult,
    Trajectory,
    fidelity,
    integrate,
    lindblad_rhs,
    min_eigenvalue,
    parity_and_feedback,
    population,
    purity,
    steady_state,
    steady_state_direct,
    steady_state_krylov,
    trace,
)
from .experiments import (
    CheckRow,
    ScenarioConfig,
    ScenarioResult,
    emit_config,
    emit_report,
    parse_config,
    run_appendix_compare,
    run_g_fluctuation,
    run_param_table,
    run_scenario,
    scenario_defaults,
)

__all__ = [
    "DensityMatrix",
    "SpaceSpec",
    "SparseOperator",
    "StateVector",
    "build_space",
    "cavity_annihilation",
    "commutator",
    "embed_site_operator",
    "expectation",
    "ket_bra",
    "ket_from_labels",
    "projector",
    "site_dyad",
    "trace_out_cavity",
    "CollapseChannel",
    "ModelParams",
    "build_collapse_channels",
    "build_hk",
    "build_hr",
    "build_stark_compensation",
    "named_states",
    "rydberg_u_from_geometry",
    "AdiabaticElimination",
    "RotatingTerm",
    "SymmetricAmplitudes",
    "TimeDependentHamiltonian",
    "ZenoDecomposition",
    "adiabatic_eliminate",
    "amplitude_rhs",
    "build_effective_full_model",
    "build_effective_zpump",
    "light_shift_diagonal",
    "symmetric_hr_4x4",
    "zeno_decompose",
    "IntegrationError",
    "IntegratorControls",
    "LindbladModel",
    "SteadyStateCriterion",
    "SteadyStateResult",
    "Trajectory",
    "fidelity",
    "integrate",
    "lindblad_rhs",
    "min_eigenvalue",
    "parity_and_feedback",
    "population",
    "purity",
    "steady_state",
    "steady_state_direct",
    "steady_state_krylov",
    "trace",
    "CheckRow",
    "ScenarioConfig",
    "ScenarioResult",
    "emit_config",
    "emit_report",
    "parse_config",
    "run_appendix_compare",
    "run_g_fluctuation",
    "run_param_table",
    "run_scenario",
    "scenario_defaults",
    "__version__",
]

__version__ = "0.1.0"
