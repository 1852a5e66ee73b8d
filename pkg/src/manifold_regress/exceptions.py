"""Exception types shared across the package.

EstimatorError subclasses signal numeric failures inside estimators;
the CLI maps them to exit code 3.  ConfigError signals malformed user
configuration and maps to exit code 2.
"""


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""


class EstimatorError(RuntimeError):
    """A numeric failure inside an estimator."""


class NearSingularDesignError(EstimatorError):
    """Local-polynomial design matrix is numerically singular."""

    def __init__(self, min_eigen, message=None):
        self.min_eigen = min_eigen
        super().__init__(
            message
            or f"near-singular local design matrix (min eigenvalue {min_eigen:.3e})"
        )


class EmptyWindowError(EstimatorError):
    """All kernel weights vanish at the requested evaluation point."""


class SingularDesignError(EstimatorError):
    """Global linear design matrix is singular (all covariates equal)."""
