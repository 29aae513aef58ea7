"""Entanglement detection for continuous-variable states whose Wigner
functions are polynomials times Gaussians.

The package evaluates and optimizes a hierarchy of separability witnesses
tau_{k,n} over Gaussian probe states, cross-checks against the PPT
criterion, propagates states through thermal-loss channels, and estimates
the witness from simulated Gaussian measurement statistics.
"""

from .errors import (
    InvalidBipartitionError,
    NumericalFailureError,
    OptimizationFailureError,
    OracleInapplicableError,
    SampleSizeError,
    StateFileError,
    ValidationError,
)
from .symplectic import (
    GaussianEnvelope,
    ThreeModePureStandardForm,
    TwoModeStandardForm,
    partial_transpose,
    ppt_separable,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_invariants_3mode,
    vacuum_envelope,
)
from .polynomials import (
    MultiPoly,
    PolyGaussianState,
    QuadraticKernel,
    apply_gaussian_operator,
    poly_affine_substitute,
    poly_eval,
    quadrature_matrix_element,
    quadrature_wigner_integral,
)
from .probes import (
    Bipartition,
    GaussianWeylSymbol,
    ProbeSet,
    SingleModeProbe,
    composite_offdiag_moments,
    diagonal_moments,
    enumerate_bipartitions,
    permuted_moments,
)
from .hierarchy import (
    CoefficientScheme,
    HierarchyResult,
    tau_gaussian,
    tau_general,
    tau_symmetric,
    weyl_matrix_element,
)
from .optimize import (
    ClassificationEntry,
    OptimizationReport,
    OptimizerConfig,
    ProbeParameterization,
    classify_state,
    maximize_tau,
    scheme_for,
)
from .ppt_analysis import (
    ResemblanceCheck,
    ResemblanceReport,
    ZMatrixReport,
    probe_covariance,
    verify_ppt_resemblance,
    z_eigenvalues,
    z_limit_matrix,
    z_matrix,
    z_report,
)
from .catalog import (
    CpsTsvsParams,
    FIG_AMPLITUDE_GRID,
    FIG_EVOLUTION_GRID,
    FIG_GHZ_GRID,
    GhzParams,
    ThermalChannel,
    cps_tsvs_state,
    evolved_polynomial_check,
    ghz_state,
    ghz_symplectic_spectrum,
    green_propagate,
)
from .measurement import (
    GaussianMeasurement,
    MonteCarloEstimate,
    OutcomeSample,
    characteristic_fn,
    estimate_tau_monte_carlo,
    load_samples,
    outcome_pdf,
    sample_outcomes,
    save_samples,
    tau_from_statistics,
)
from .statefile import (
    load_coefficients,
    load_probe,
    load_state,
    save_probe,
    save_state,
)

__version__ = "0.1.0"
