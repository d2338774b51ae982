"""Exact correlation functions of the integrable spin-1 chain.

Layers, bottom up: exact arithmetic (polynomials, rational functions,
Laurent series, pi-polynomials), the lattice R-matrix/fusion toolkit,
the Matsubara spectral engine, the fermion-current normal-ordering
algebra, the zero-temperature two-point kernel, and the correlator
pipeline that assembles exact pi-polynomial values.
"""

from .currents import (
    KINDS,
    RULES,
    Letter,
    NormalForm,
    admissible,
    canonicalize,
    mode_extract,
    normal_order,
    parse_word,
)
from .engine import (
    LocalOperator,
    SpectralState,
    build_ss_operator,
    direct_expectation,
    dominant_state,
)
from .errors import (
    CalibrationFailure,
    ConfigError,
    DegenerateDominantEigenvalue,
    DimensionMismatch,
    DirectionDependence,
    NonTerminating,
    NotADensityMatrix,
    PoleAtZ,
    ResidualOmega,
    S1FCError,
    SingularExtraction,
    SingularLimit,
    SingularSystem,
    UncalibratedSign,
    ZeroDenominator,
    ZeroEigenvalue,
)
from .exact import (
    BigFloat,
    LaurentSeries,
    PiPoly,
    Poly,
    RationalFunction,
    decimal_str,
    parse_pipoly,
    pipoly_eval,
)
from .lattice import (
    LAX_CONSTANTS,
    MatsubaraData,
    check_commutation,
    check_eigen_relation,
    check_fusion,
    check_yang_baxter,
    fused_monodromy,
    fused_transfer_matrix,
    fusion_projector,
    lax,
    max_dim,
    monodromy_blocks,
    quantum_determinant,
    r_half,
    r_s1,
    spin_matrices,
    transfer_matrix,
)
from .omega import (
    OmegaExpr,
    assert_omega_cancellation,
    expand_homogeneous,
    kernel_entry,
    omega_reduce,
    p_series_at,
    p_unit_series,
    phi_ratfunc,
    phi_value,
)
from .pipeline import (
    CorrelatorResult,
    Evaluator,
    FitResult,
    correlator,
    entropy,
    fit_framework,
    load_table,
    plain_expectation,
    reference_value,
    reference_values,
)

__version__ = "0.1.0"

__all__ = [
    "BigFloat",
    "CalibrationFailure",
    "ConfigError",
    "CorrelatorResult",
    "DegenerateDominantEigenvalue",
    "DimensionMismatch",
    "DirectionDependence",
    "Evaluator",
    "FitResult",
    "KINDS",
    "LAX_CONSTANTS",
    "LaurentSeries",
    "Letter",
    "LocalOperator",
    "MatsubaraData",
    "NonTerminating",
    "NormalForm",
    "NotADensityMatrix",
    "OmegaExpr",
    "PiPoly",
    "Poly",
    "PoleAtZ",
    "RationalFunction",
    "ResidualOmega",
    "S1FCError",
    "SingularExtraction",
    "SingularLimit",
    "SingularSystem",
    "SpectralState",
    "UncalibratedSign",
    "ZeroDenominator",
    "ZeroEigenvalue",
    "admissible",
    "assert_omega_cancellation",
    "build_ss_operator",
    "canonicalize",
    "check_commutation",
    "check_eigen_relation",
    "check_fusion",
    "check_yang_baxter",
    "correlator",
    "decimal_str",
    "direct_expectation",
    "dominant_state",
    "entropy",
    "expand_homogeneous",
    "fit_framework",
    "fused_monodromy",
    "fused_transfer_matrix",
    "fusion_projector",
    "kernel_entry",
    "lax",
    "load_table",
    "max_dim",
    "mode_extract",
    "monodromy_blocks",
    "normal_order",
    "omega_reduce",
    "p_series_at",
    "p_unit_series",
    "parse_pipoly",
    "parse_word",
    "phi_ratfunc",
    "phi_value",
    "pipoly_eval",
    "plain_expectation",
    "quantum_determinant",
    "r_half",
    "r_s1",
    "reference_value",
    "reference_values",
    "spin_matrices",
    "transfer_matrix",
    "RULES",
]
