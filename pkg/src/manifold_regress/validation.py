"""Input validation helpers shared by the estimators."""

import numpy as np


class NotFittedError(RuntimeError):
    """predict was called before fit."""


def check_covariates(x):
    """Coerce covariates to a finite, ascending 1-D float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("covariates must be a 1-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError("covariates must be finite")
    return x


def check_xy(x, y, space):
    """Validate a regression sample (x sorted ascending, y in space)."""
    x = check_covariates(x)
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, np.newaxis]
    if len(x) != len(y):
        raise ValueError(f"covariates ({len(x)}) and responses ({len(y)}) disagree in length")
    if len(x) < 2:
        raise ValueError("need at least 2 observations")
    if np.any(np.diff(x) < 0):
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
    return x, space.check_points(y)


def check_eval_points(t):
    """Coerce prediction points to a 1-D float array, remembering scalars."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.ndim != 1:
        raise ValueError("evaluation points must be scalar or 1-D")
    return t, scalar


def check_is_fitted(estimator, attribute):
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(
            f"{type(estimator).__name__} must be fitted before calling predict"
        )
