"""Regression estimators for sphere-valued responses.

Seven estimators of a curve m: [0, 1] -> S^2 from noisy observations
(x_i, y_i): three parametric fits built on geodesics and four
nonparametric smoothers, together with the sphere geometry, the
contracted-uniform noise model, derivative-free optimizers, and a
seeded Monte-Carlo harness for MISE tables and convergence-rate
checks.
"""

from .exceptions import (
    ConfigError,
    EmptyWindowError,
    EstimatorError,
    NearSingularDesignError,
    SingularDesignError,
)
from .geometry import (
    AntipodalPointsError,
    dist,
    exp_map,
    from_angles,
    log_map,
    rotation_to,
    tangent_basis,
    to_angles,
)
from .spaces import Euclidean, Sphere
from .sampling import (
    SD_MAX,
    Dataset,
    Geodesic,
    Simple,
    Spiral,
    contraction_to_sd,
    curve_point,
    equispaced,
    generate_dataset,
    random_geodesic,
    read_dataset_csv,
    sample_cntr_unif,
    sd_to_contraction,
    write_dataset_csv,
)
from .weights import (
    KernelSpec,
    kernel_eval,
    linfre_weights,
    local_poly_weights,
    psi_vec,
    trifre_weights,
)
from .optimize import (
    OptOptions,
    minimize_box,
    minimize_on_sphere,
    minimize_on_tangent_bundle,
    minimize_scalar,
)
from .estimators import (
    METHODS,
    CosineRegressor,
    CurveEstimate,
    GeodesicRegressor,
    LinearFrechetRegressor,
    LocalFrechetRegressor,
    LocalGeodesicRegressor,
    ReflectedRegressor,
    TrigFrechetRegressor,
    TrigGeodesicRegressor,
    make_estimator,
    reflect_dataset,
)
from .evaluation import (
    H_GRID,
    N_GRID,
    ExperimentConfig,
    RateCheckConfig,
    ise,
    loocv_select,
    rate_check,
    resolve_curve,
    run_mise,
)

__version__ = "0.1.0"

__all__ = [
    "AntipodalPointsError",
    "ConfigError",
    "CosineRegressor",
    "CurveEstimate",
    "Dataset",
    "EmptyWindowError",
    "EstimatorError",
    "Euclidean",
    "ExperimentConfig",
    "Geodesic",
    "GeodesicRegressor",
    "H_GRID",
    "KernelSpec",
    "LinearFrechetRegressor",
    "LocalFrechetRegressor",
    "LocalGeodesicRegressor",
    "METHODS",
    "N_GRID",
    "NearSingularDesignError",
    "OptOptions",
    "RateCheckConfig",
    "ReflectedRegressor",
    "SD_MAX",
    "Simple",
    "SingularDesignError",
    "Sphere",
    "Spiral",
    "TrigFrechetRegressor",
    "TrigGeodesicRegressor",
    "contraction_to_sd",
    "curve_point",
    "dist",
    "equispaced",
    "exp_map",
    "from_angles",
    "generate_dataset",
    "ise",
    "kernel_eval",
    "linfre_weights",
    "local_poly_weights",
    "log_map",
    "loocv_select",
    "make_estimator",
    "minimize_box",
    "minimize_on_sphere",
    "minimize_on_tangent_bundle",
    "minimize_scalar",
    "psi_vec",
    "random_geodesic",
    "rate_check",
    "read_dataset_csv",
    "reflect_dataset",
    "resolve_curve",
    "rotation_to",
    "run_mise",
    "sample_cntr_unif",
    "sd_to_contraction",
    "tangent_basis",
    "to_angles",
    "trifre_weights",
    "write_dataset_csv",
]
