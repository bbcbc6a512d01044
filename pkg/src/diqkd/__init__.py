"""Device-independent QKD key rates for photonic pair sources.

The package bounds an eavesdropper's information from an observed CHSH score
alone, models the click statistics of a downconversion source through lossy
threshold detectors, and optimizes the resulting asymptotic key rate over
states, measurement settings, and preprocessing noise.
"""

from ._accel import NUMBA_ENABLED, set_threads
from .entropy import (
    binary_entropy,
    conditional_entropy,
    eve_info_bound,
    hermitian4_eigenvalues,
    shannon_entropy,
    symmetrized_conditional_entropy,
)
from .evebound import (
    OracleResult,
    bell_chsh,
    eve_conditional_entropy,
    eve_conditional_state,
    eve_information,
    oracle_max_eve_info,
    random_weights,
    verify_monotonicity,
)
from .fock import fock_joint_distribution
from .rates import (
    POSITIVE_RATE,
    SOURCES,
    VARIANTS,
    OptimizerOptions,
    ParameterPoint,
    ProtocolSpec,
    RateResult,
    ThresholdResult,
    key_rate,
    optimize_rate,
    rate_curve,
    threshold_efficiency,
)
from .spdc import (
    BINARY_OUTCOMES,
    DetectionModel,
    JointOutcomeDistribution,
    MeasurementSetting,
    SqueezedSourceParams,
    binarize,
    chsh_score,
    correlator,
    coupling_matrix,
    error_correction_term,
    joint_outcome_distribution,
    noclick_probability,
    qubit_source_distribution,
)
from .verify import SUITES, SuiteReport, run_suites

__version__ = "1.0.0"

__all__ = [
    "BINARY_OUTCOMES",
    "DetectionModel",
    "JointOutcomeDistribution",
    "MeasurementSetting",
    "NUMBA_ENABLED",
    "OptimizerOptions",
    "OracleResult",
    "POSITIVE_RATE",
    "ParameterPoint",
    "ProtocolSpec",
    "RateResult",
    "SOURCES",
    "SUITES",
    "SqueezedSourceParams",
    "SuiteReport",
    "ThresholdResult",
    "VARIANTS",
    "__version__",
    "bell_chsh",
    "binarize",
    "binary_entropy",
    "chsh_score",
    "conditional_entropy",
    "correlator",
    "coupling_matrix",
    "error_correction_term",
    "eve_conditional_entropy",
    "eve_conditional_state",
    "eve_info_bound",
    "eve_information",
    "fock_joint_distribution",
    "hermitian4_eigenvalues",
    "joint_outcome_distribution",
    "key_rate",
    "noclick_probability",
    "optimize_rate",
    "oracle_max_eve_info",
    "qubit_source_distribution",
    "random_weights",
    "rate_curve",
    "run_suites",
    "set_threads",
    "shannon_entropy",
    "symmetrized_conditional_entropy",
    "threshold_efficiency",
    "verify_monotonicity",
]
