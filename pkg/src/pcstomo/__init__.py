"""Shadow-based quantum state tomography with physical projections.

Simulates single-shot Haar-random projective measurements, accumulates the
classical shadow estimate of the measured state, and projects it onto a
physical target set: all density matrices (simplex projection), rank-r states
(rank truncation plus simplex), or matrix-product operators (tensor-train bond
truncation plus simplex).  A Monte Carlo harness reproduces the error-scaling
behaviour of each estimator.
"""

from .linalg import (
    HermitianEig,
    NumericTolerances,
    TOLERANCES,
    expm_hermitian,
    haar_unitary,
    hermitian_eig,
    truncated_svd,
    tt_contract,
    tt_sweep,
)
from .measurement import (
    MeasurementRecord,
    NumericIntegrityError,
    ShadowAccumulator,
    accumulate,
    collect_shadow,
    cs_estimate,
    measure_once,
    outcome_probabilities,
    outcome_probabilities_pure,
    snapshot_matrix,
)
from .metrics import (
    ErrorRecord,
    error_record,
    frobenius_distance,
    predicted_mse,
    summarize,
    trace_distance,
)
from .projections import (
    TruncationReport,
    hermitize,
    lr_pcs,
    mpo_pcs,
    project_rank,
    project_simplex_state,
    project_simplex_vector,
    project_trace,
    tt_svd,
)
from .rng import RngStream, hash64
from .states import (
    DENSE_QUBIT_LIMIT,
    DensityMatrix,
    MpoState,
    ghz_state,
    ising_hamiltonian,
    matrix_to_site_tensor,
    mpo_to_dense,
    qubit_count,
    random_lowrank_state,
    random_mps_state,
    site_tensor_to_matrix,
    thermal_state,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    Method,
    ResultTable,
    StateSpec,
    TrialResult,
    emit_csv,
    emit_summary,
    load_config,
    parse_method,
    preset_configs,
    run_experiment,
    run_trial,
    save_config,
    summarize_results,
    trial_seed,
)
from .fileio import (
    load_density_file,
    load_mpo_file,
    save_density_file,
    save_mpo_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
