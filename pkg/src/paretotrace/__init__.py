"""Active-subspace discovery and Pareto-front tracing for objective pairs.

The package turns two expensive black-box objectives over a bounded box
of positive parameters into a cheap, explicit trade-off curve: sample
gradients in log-scaled coordinates, find each objective's dominant
subspace, blend the two subspaces along their Grassmann geodesic, fit
convex quadratic surrogates in the blended coordinates, and trace the
scalarized optima from one objective's optimum to the other's.
"""

from .domain import (
    ParameterSpace,
    ParameterSpec,
    SampleSet,
    Scenario,
    load_parameter_space,
    load_table1,
    sample_uniform,
    scale_to_unit,
    unscale_from_unit,
)
from .errors import (
    ConfigError,
    ContinuationError,
    DegenerateSpectrumError,
    DomainError,
    EvaluationError,
    FitError,
    InfeasibleFiberError,
    OrthogonalSubspaceError,
    ParetoTraceError,
    SchemaError,
    TraceSingularityError,
)
from .gradients import (
    GradientSet,
    ObjectivePair,
    SpectralEstimate,
    analytic_gradient,
    estimate_C,
    fd_gradient,
    sample_gradients,
    spectral_from_gradients,
)
from .grassmann import (
    GeodesicPath,
    MixResult,
    geodesic,
    mix_subspaces,
    principal_angles,
    subspace_distance,
)
from .pareto import (
    FrontCurve,
    FrontSample,
    ParetoTrace,
    Zonotope2D,
    evaluate_trace_objectives,
    in_projected_domain,
    non_dominated,
    ode_trace,
    project_domain_2d,
    quadratic_trace,
    sample_inactive_fiber,
    scalarize,
)
from .subspace import (
    Frame,
    QuadraticSurrogate,
    RidgeModel,
    fit_ridge,
    monomial_exponents,
    project,
    select_rank,
    shadow_data,
    to_quadratic,
)

__version__ = "0.1.0"

__all__ = [
    "ParameterSpace",
    "ParameterSpec",
    "SampleSet",
    "Scenario",
    "load_parameter_space",
    "load_table1",
    "sample_uniform",
    "scale_to_unit",
    "unscale_from_unit",
    "ConfigError",
    "ContinuationError",
    "DegenerateSpectrumError",
    "DomainError",
    "EvaluationError",
    "FitError",
    "InfeasibleFiberError",
    "OrthogonalSubspaceError",
    "ParetoTraceError",
    "SchemaError",
    "TraceSingularityError",
    "GradientSet",
    "ObjectivePair",
    "SpectralEstimate",
    "analytic_gradient",
    "estimate_C",
    "fd_gradient",
    "sample_gradients",
    "spectral_from_gradients",
    "GeodesicPath",
    "MixResult",
    "geodesic",
    "mix_subspaces",
    "principal_angles",
    "subspace_distance",
    "FrontCurve",
    "FrontSample",
    "ParetoTrace",
    "Zonotope2D",
    "evaluate_trace_objectives",
    "in_projected_domain",
    "non_dominated",
    "ode_trace",
    "project_domain_2d",
    "quadratic_trace",
    "sample_inactive_fiber",
    "scalarize",
    "Frame",
    "QuadraticSurrogate",
    "RidgeModel",
    "fit_ridge",
    "monomial_exponents",
    "project",
    "select_rank",
    "shadow_data",
    "to_quadratic",
    "__version__",
]
