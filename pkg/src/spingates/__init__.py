"""Nuclear-spin NOT/CNOT gate simulation under a cosine-modulated longitudinal field.

The library integrates the complex amplitude equations of a driven spin-1/2
(and an Ising-coupled pair) whose longitudinal field magnitude varies as
cos(delta*t), and quantifies how the gate fidelity degrades as the
modulation frequency delta grows.
"""

from .model import (
    Frame,
    ModulatedRHS,
    OneQubitParams,
    TwoQubitParams,
    as_state,
    basis_state,
    cnot_resonance,
    energy_spectrum,
    from_mhz,
    lab_to_rotating,
    make_rhs,
    not_resonance,
    one_qubit_rhs,
    populations,
    rhs_one_qubit,
    rhs_two_qubit,
    rotating_to_lab,
    standard_cnot_params,
    standard_not_params,
    to_mhz,
    two_qubit_rhs,
)
from .integrate import (
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    integrate,
    norm_drift,
)
from .gates import (
    FidelityReport,
    GateRun,
    PulseSpec,
    digital_cnot_input,
    fidelity_report,
    ideal_cnot_target,
    ideal_not_target,
    pi_pulse_duration,
    run_cnot_gate,
    run_not_gate,
    run_pulse,
    superposition_cnot_input,
)
from .sweep import (
    ConsistencyError,
    GateKind,
    Scale,
    SweepError,
    SweepResult,
    SweepSpec,
    ThresholdBracketError,
    find_threshold,
    mathieu_alpha,
    mathieu_residual,
    reconstruct_excited_amplitude,
    rotating_not_trajectory,
    run_sweep,
)
from .cli import ConfigError, ExperimentConfig, emit_csv, format_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "ExperimentConfig",
    "FidelityReport",
    "Frame",
    "GateKind",
    "GateRun",
    "IntegrationError",
    "IntegratorConfig",
    "ModulatedRHS",
    "OneQubitParams",
    "PulseSpec",
    "Scale",
    "SweepError",
    "SweepResult",
    "SweepSpec",
    "ThresholdBracketError",
    "Trajectory",
    "TwoQubitParams",
    "as_state",
    "basis_state",
    "cnot_resonance",
    "digital_cnot_input",
    "emit_csv",
    "energy_spectrum",
    "fidelity_report",
    "find_threshold",
    "format_config",
    "from_mhz",
    "ideal_cnot_target",
    "ideal_not_target",
    "integrate",
    "lab_to_rotating",
    "make_rhs",
    "mathieu_alpha",
    "mathieu_residual",
    "norm_drift",
    "not_resonance",
    "one_qubit_rhs",
    "parse_config",
    "pi_pulse_duration",
    "populations",
    "reconstruct_excited_amplitude",
    "rhs_one_qubit",
    "rhs_two_qubit",
    "rotating_not_trajectory",
    "rotating_to_lab",
    "run_cnot_gate",
    "run_not_gate",
    "run_pulse",
    "run_sweep",
    "standard_cnot_params",
    "standard_not_params",
    "superposition_cnot_input",
    "to_mhz",
    "two_qubit_rhs",
    "__version__",
]
