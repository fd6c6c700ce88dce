"""Tomography of chaotic kicked-top dynamics"""
from .state import (
    ConfigError,
    DimensionMismatchError,
    DynamicsKind,
    DynamicsSpec,
    EnsembleKind,
    ExperimentConfig,
    ExperimentKind,
    NoInformationError,
    RunSummary,
    RuntimeSettings,
    TomochaosError,
)
from .spin import (
    BlochVector,
    DensityMatrix,
    OperatorBasis,
    SpinSystem,
    bloch_expand,
    bloch_pack,
    make_gellmann_basis,
    make_spin_system,
    matrix_exponential_hermitian_generator,
)
from .floquet import (
    FloquetMap,
    ObservableSequence,
    heisenberg_sequence,
    kicked_top_no_tr,
    kicked_top_tr,
    parity_operator,
    swap_reversal_residual,
    time_reversal_check,
)
from .ensembles import (
    EnsembleSpec,
    dephased_entropy_prediction,
    sample_coe,
    sample_haar,
    sample_parity_block_coe,
    wootters_entropy_prediction,
)
from .classical import SpherePoint, classical_kick_map, correspondence_check, phase_portrait
from .metrics import (
    MetricsPoint,
    asymptotic_inv_covariance,
    collective_fisher,
    covariance_entropy,
    fidelity,
    log_inverse_volume,
)
from .tomography import (
    CovarianceSummary,
    MeasurementRecord,
    ReconstructionResult,
    invert_record,
    project_to_physical,
    run_tomography,
    simulate_record,
)
from .config import load_config, load_settings, parse_config
from .runner import ExperimentRunner, run_experiment

__all__ = [
    "TomochaosError",
    "ConfigError",
    "DimensionMismatchError",
    "NoInformationError",
    "ExperimentKind",
    "EnsembleKind",
    "DynamicsKind",
    "DynamicsSpec",
    "ExperimentConfig",
    "RuntimeSettings",
    "RunSummary",
    "SpinSystem",
    "OperatorBasis",
    "DensityMatrix",
    "BlochVector",
    "make_spin_system",
    "make_gellmann_basis",
    "bloch_expand",
    "bloch_pack",
    "matrix_exponential_hermitian_generator",
    "FloquetMap",
    "ObservableSequence",
    "kicked_top_tr",
    "kicked_top_no_tr",
    "time_reversal_check",
    "swap_reversal_residual",
    "parity_operator",
    "heisenberg_sequence",
    "EnsembleSpec",
    "sample_haar",
    "sample_coe",
    "sample_parity_block_coe",
    "wootters_entropy_prediction",
    "dephased_entropy_prediction",
    "SpherePoint",
    "classical_kick_map",
    "phase_portrait",
    "correspondence_check",
    "MetricsPoint",
    "fidelity",
    "covariance_entropy",
    "collective_fisher",
    "log_inverse_volume",
    "asymptotic_inv_covariance",
    "MeasurementRecord",
    "CovarianceSummary",
    "ReconstructionResult",
    "simulate_record",
    "invert_record",
    "project_to_physical",
    "run_tomography",
    "parse_config",
    "load_config",
    "load_settings",
    "ExperimentRunner",
    "run_experiment",
]
