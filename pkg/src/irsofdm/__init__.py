"""Wideband OFDM link simulator for reconfigurable reflecting surfaces.

Per-element reflection is modeled two ways: an equivalent-circuit model
(parallel resonant tank with a tunable capacitor) and a fitted analytical
model that maps a target phase at the design frequency to the realized
amplitude/phase response across the band.  On top sit frequency-selective
channel generation, water-filling power allocation, and discrete-phase
reflect beamforming via coordinate descent.
"""

from .circuit import (
    CircuitParams,
    SingularCircuitError,
    UnreachablePhaseError,
    PolarReflection,
    wrap_phase,
    impedance,
    reflection,
    solve_capacitance,
    sweep_reflection,
)
from .reflection_model import (
    ModelParams,
    PhaseCodebook,
    FitSample,
    FitReport,
    FitConstraintError,
    codebook,
    resonance_ghz,
    phase_slope,
    model_phase,
    model_amplitude,
    model_reflection,
    reflection_table,
    fit_model,
    read_fit_samples,
    write_fit_samples,
)
from .channel import (
    PathLossExponents,
    SystemConfig,
    ChannelRealization,
    dbm_to_watts,
    watts_to_dbm,
    path_loss_gain,
    subcarrier_frequencies,
    ap_user_distance,
    generate_channels,
    take_elements,
)
from .optimizer import (
    PowerAllocation,
    PowerAllocationError,
    BeamformingState,
    OptimizationTrace,
    effective_gains,
    effective_gain,
    average_rate,
    water_filling,
    alignment_init,
    random_init,
    reflect_beamforming,
    alternating_optimize,
    ideal_design,
    exhaustive_search,
)
from .config import ConfigError, ExperimentConfig, load_config, default_config
from .experiments import (
    drop_channel,
    run_model_validation,
    run_rate_vs_power,
    run_rate_vs_elements,
    run_convergence_trace,
    write_result_csv,
)

__version__ = "0.1.0"
