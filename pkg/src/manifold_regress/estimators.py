"""Seven regression estimators for sphere-valued responses.

Three parametric estimators fit a single geodesic model globally
(GeodesicRegressor, LinearFrechetRegressor, CosineRegressor) and four
nonparametric ones smooth locally or by series projection
(LocalGeodesicRegressor, LocalFrechetRegressor, TrigGeodesicRegressor,
TrigFrechetRegressor).  All follow the fit/predict estimator idiom
with get_params/set_params; fitted attributes carry a trailing
underscore.  Estimators are pure given (data, params, optimizer seed).

The Frechet-type estimators (everything except the cosine fit) are
written against the metric-space interface, so they also run on the
Euclidean instance where every minimization has a closed form; that
path is the numerical oracle for the sphere pipeline.
"""

import inspect
from dataclasses import dataclass, replace

import numpy as np

from . import geometry
from .exceptions import EmptyWindowError, EstimatorError
from .optimize import OptOptions, minimize_box, minimize_on_sphere, minimize_scalar
from .sampling import Dataset
from .spaces import Sphere, geodesic_candidates
from .validation import check_eval_points, check_is_fitted, check_xy
from .weights import (
    KernelSpec,
    kernel_eval,
    linfre_weights,
    local_poly_weights,
    psi_vec,
    trifre_weights,
)

# Retries for widening the bandwidth when a local window is empty or
# its design matrix is near-singular; each retry doubles h.
_WIDEN_RETRIES = 3

_EVAL_GRID_SIZE = 101


@dataclass
class CurveEstimate:
    """A fitted curve: a predictor plus its sampled trace on a grid."""

    method: str
    ts: np.ndarray
    points: np.ndarray
    hyper: dict
    predict: callable


class CurveRegressor:
    """Base class: parameter introspection and the shared fit/predict plumbing."""

    def get_params(self, deep=True):
        names = [
            p.name
            for p in inspect.signature(type(self).__init__).parameters.values()
            if p.name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]
        return {name: getattr(self, name) for name in names}

    def set_params(self, **params):
        valid = self.get_params()
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"unknown parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    def _store_fit_data(self, x, y):
        self.x_, self.y_ = check_xy(x, y, self.space)
        return self.x_, self.y_

    def _options(self):
        return self.options if self.options is not None else OptOptions()

    def _per_point_options(self, coarse=128):
        """Options for the many small per-point minimizations.

        A reduced coarse grid is plenty for those; explicit user
        options are respected unchanged.
        """
        if self.options is not None:
            return self.options
        return OptOptions(coarse_grid_size=coarse)

    def predict(self, t):
        raise NotImplementedError

    def curve_estimate(self, grid_size=_EVAL_GRID_SIZE, domain=(0.0, 1.0)):
        """Sample the fitted curve on an equispaced grid."""
        ts = np.linspace(domain[0], domain[1], grid_size)
        return CurveEstimate(
            method=getattr(self, "method_tag", type(self).__name__),
            ts=ts,
            points=self.predict(ts),
            hyper=self.fitted_hyper(),
            predict=self.predict,
        )

    def fitted_hyper(self):
        return {}


class GeodesicRegressor(CurveRegressor):
    """Global geodesic least squares: argmin over (p, v) of sum d(y_i, Exp(p, x_i v))^2.

    The velocity bound vmax caps the searched speed.  Prediction is
    Exp(p, t v) for the fitted pair.
    """

    method_tag = "lingeo"

    def __init__(self, vmax=4.0 * np.pi, space=Sphere(2), options=None):
        self.vmax = vmax
        self.space = space
        self.options = options

    def fit(self, x, y):
        x, y = self._store_fit_data(x, y)
        ones = np.ones(len(x))
        self.base_point_, self.velocity_ = self.space.geodesic_argmin(
            x, y, ones, vmax=self.vmax, options=self._options()
        )
        return self

    def predict(self, t):
        check_is_fitted(self, "base_point_")
        t, scalar = check_eval_points(t)
        out = self.space.exp(self.base_point_, t[:, np.newaxis] * self.velocity_)
        return out[0] if scalar else out

    def fitted_hyper(self):
        return {"vmax": self.vmax}


class LinearFrechetRegressor(CurveRegressor):
    """Linear-weight Frechet regression.

    Global linear-smoother weights w_i(t) reproduce (1, t) exactly; the
    prediction at t minimizes sum w_i(t) d(y_i, q)^2 over the space.
    The textbook objective subtracts d(y_i, o)^2 for an offset point o;
    that term is constant in q, so it is dropped here and the argmin is
    unchanged.
    """

    method_tag = "linfre"

    def __init__(self, space=Sphere(2), options=None):
        self.space = space
        self.options = options

    def fit(self, x, y):
        self._store_fit_data(x, y)
        return self

    def predict(self, t):
        check_is_fitted(self, "x_")
        t, scalar = check_eval_points(t)
        opts = self._options()
        out = np.empty((len(t), self.y_.shape[1]))
        for i, ti in enumerate(t):
            w = linfre_weights(self.x_, ti)
            out[i] = self.space.frechet_argmin(self.y_, w, options=opts)
        return out[0] if scalar else out


class CosineRegressor(CurveRegressor):
    """Sinusoid fit to cosine-transformed distances (S^2 only).

    For each reference point q the transformed responses
    z_{q,i} = cos(d(y_i, q)) = <y_i, q> follow a_q cos(lambda x) +
    b_q sin(lambda x) when the truth is a geodesic; lambda is chosen to
    minimize the total squared residual over three fixed reference
    points, and prediction maximizes the fitted amplitude over q.
    """

    method_tag = "lincos"

    def __init__(self, speed_bound=4.0 * np.pi, refs=None, space=Sphere(2), options=None):
        self.speed_bound = speed_bound
        self.refs = refs
        self.space = space
        self.options = options

    def fit(self, x, y):
        if not isinstance(self.space, Sphere) or self.space.k != 2:
            raise ValueError("the cosine estimator is defined on S^2 only")
        x, y = self._store_fit_data(x, y)
        refs = np.eye(3) if self.refs is None else geometry.as_point(np.asarray(self.refs, dtype=float))
        if refs.shape != (3, 3):
            raise ValueError("need exactly 3 reference points")
        z = y @ refs.T

        def residual(lam):
            coef, fitted = _sinusoid_fit(x, z, lam)
            return float(np.sum((z - fitted) ** 2))

        self.lambda_, _ = minimize_scalar(residual, 0.0, self.speed_bound, self._options())
        # The same normal equations applied to the raw responses give
        # the coefficient fields over all q at once: a_q = <alpha, q>,
        # b_q = <beta, q>, because z_{q,i} is linear in q.
        coef, _ = _sinusoid_fit(x, y, self.lambda_)
        self.coef_ = coef
        return self

    def predict(self, t):
        check_is_fitted(self, "coef_")
        t, scalar = check_eval_points(t)
        opts = self._options()
        amp = (
            np.cos(self.lambda_ * t)[:, np.newaxis] * self.coef_[0]
            + np.sin(self.lambda_ * t)[:, np.newaxis] * self.coef_[1]
        )
        out = np.empty((len(t), 3))
        for i, c in enumerate(amp):
            norm = np.linalg.norm(c)
            seeds = c[np.newaxis] / norm if norm > 1e-12 else None
            out[i], _ = minimize_on_sphere(lambda q: -(q @ c), 2, opts, seeds)
        return out[0] if scalar else out

    def fitted_hyper(self):
        return {"lambda": self.lambda_, "speed_bound": self.speed_bound}


def _sinusoid_fit(x, targets, lam):
    """Least-squares fit of targets on (cos(lam x), sin(lam x)).

    Returns (coef, fitted); falls back to an intercept-only fit when
    the two regressors are numerically collinear (e.g. lam = 0).
    """
    design = np.stack([np.cos(lam * x), np.sin(lam * x)], axis=-1)
    gram = design.T @ design
    if np.linalg.det(gram) > 1e-10 * max(1.0, gram.trace() ** 2):
        coef = np.linalg.solve(gram, design.T @ targets)
    else:
        ones = design[:, :1]
        coef = np.zeros((2,) + targets.shape[1:])
        coef[0] = (ones.T @ targets)[0] / (ones[:, 0] @ ones[:, 0])
    return coef, design @ coef


class LocalGeodesicRegressor(CurveRegressor):
    """Locally geodesic regression with kernel weights.

    At each t, fits a geodesic segment to the observations in the
    kernel window via argmin over (p, v) of
    sum w_i d(y_i, Exp(p, (x_i - t)/h v))^2 and predicts p.  Empty
    windows widen h by doubling, up to 3 times.
    """

    method_tag = "locgeo"

    def __init__(self, h=0.2, kernel="epanechnikov", space=Sphere(2), options=None):
        self.h = h
        self.kernel = kernel
        self.space = space
        self.options = options

    def fit(self, x, y):
        self._store_fit_data(x, y)
        return self

    def predict(self, t):
        check_is_fitted(self, "x_")
        t, scalar = check_eval_points(t)
        opts = self._per_point_options()
        out = np.empty((len(t), self.y_.shape[1]))
        for i, ti in enumerate(t):
            out[i] = self._fit_window(ti, opts)
        return out[0] if scalar else out

    def _fit_window(self, t, opts):
        h = self.h
        for _ in range(_WIDEN_RETRIES + 1):
            kv = kernel_eval(self.kernel, (self.x_ - t) / h)
            live = np.flatnonzero(kv > 0.0)
            if len(live) >= 2:
                u = (self.x_[live] - t) / h
                ys = self.y_[live]
                w = kv[live] / kv[live].sum()
                seeds = None
                if isinstance(self.space, Sphere):
                    seeds = geodesic_candidates(u, ys, w, np.pi, great_circle=False)
                p, _v = self.space.geodesic_argmin(
                    u, ys, w, vmax=np.pi, options=opts, seeds=seeds
                )
                return p
            h *= 2.0
        raise EmptyWindowError(
            f"no observations within bandwidth around t={t:g} after widening"
        )

    def fitted_hyper(self):
        return {"h": self.h}


class LocalFrechetRegressor(CurveRegressor):
    """Local-polynomial Frechet regression.

    Signed local-polynomial weights of the configured order, then a
    weighted Frechet minimization at each evaluation point.
    Near-singular local designs widen h by doubling, up to 3 times.
    """

    method_tag = "locfre"

    def __init__(self, h=0.2, order=1, kernel="epanechnikov", space=Sphere(2), options=None):
        self.h = h
        self.order = order
        self.kernel = kernel
        self.space = space
        self.options = options

    def fit(self, x, y):
        if self.order not in (0, 1, 2, 3):
            raise ValueError(f"polynomial order must be 0, 1, 2, or 3, got {self.order!r}")
        self._store_fit_data(x, y)
        return self

    def predict(self, t):
        check_is_fitted(self, "x_")
        t, scalar = check_eval_points(t)
        opts = self._per_point_options()
        out = np.empty((len(t), self.y_.shape[1]))
        for i, ti in enumerate(t):
            wv = self._weights_widened(ti)
            live = np.flatnonzero(wv.w != 0.0)
            out[i] = self.space.frechet_argmin(self.y_[live], wv.w[live], options=opts)
        return out[0] if scalar else out

    def _weights_widened(self, t):
        spec = KernelSpec(self.kernel, self.h)
        last = None
        for _ in range(_WIDEN_RETRIES + 1):
            try:
                return local_poly_weights(self.x_, t, self.order, spec)
            except EstimatorError as err:
                last = err
                spec = spec.with_h(spec.h * 2.0)
        raise last

    def fitted_hyper(self):
        return {"h": self.h, "order": self.order}


class TrigGeodesicRegressor(CurveRegressor):
    """Trigonometric-series geodesic regression (S^2 only).

    Fits m(t) = Exp(p, sum_l psi_l(t) v_l) with N basis functions by a
    multi-start box search in a (2 + 2N)-dimensional tangent chart; the
    tangent coefficients are re-orthogonalized against the decoded base
    point, and a series fit in the tangent space at the extrinsic mean
    seeds the search.
    """

    method_tag = "trigeo"

    def __init__(self, N=3, coef_bound=np.pi, space=Sphere(2), options=None):
        self.N = N
        self.coef_bound = coef_bound
        self.space = space
        self.options = options

    def fit(self, x, y):
        if not isinstance(self.space, Sphere) or self.space.k != 2:
            raise ValueError("the trigonometric geodesic estimator is defined on S^2 only")
        if self.N < 1:
            raise ValueError("need at least one basis function")
        x, y = self._store_fit_data(x, y)
        opts = self._options()
        if self.options is None:
            opts = replace(opts, refine_iters=800)
        basis_vals = psi_vec(self.N, x)

        mean = y.mean(axis=0)
        norm = np.linalg.norm(mean)
        p0 = mean / norm if norm > 1e-9 else np.array([0.0, 0.0, 1.0])
        chart = geometry.tangent_basis(p0)
        seed = np.zeros(2 + 2 * self.N)
        try:
            logs = geometry.log_map(p0, y)
        except geometry.AntipodalPointsError:
            logs = None
        if logs is not None:
            coef, *_ = np.linalg.lstsq(basis_vals, logs @ chart.T, rcond=None)
            seed[2:] = np.clip(coef, -self.coef_bound, self.coef_bound).ravel()

        def objective(z):
            p = geometry.exp_map(p0, z[:2] @ chart)
            p /= np.linalg.norm(p)
            vecs = geometry.project_tangent(p, z[2:].reshape(self.N, 2) @ chart)
            curve = geometry.exp_map(p, basis_vals @ vecs)
            d = geometry.dist(curve, y)
            return float(d @ d)

        bounds = [(-np.pi, np.pi)] * 2 + [(-self.coef_bound, self.coef_bound)] * (2 * self.N)
        z, _ = minimize_box(objective, bounds, opts, seeds=[seed])
        p = geometry.exp_map(p0, z[:2] @ chart)
        self.base_point_ = p / np.linalg.norm(p)
        self.coefs_ = geometry.project_tangent(
            self.base_point_, z[2:].reshape(self.N, 2) @ chart
        )
        return self

    def predict(self, t):
        check_is_fitted(self, "base_point_")
        t, scalar = check_eval_points(t)
        out = geometry.exp_map(self.base_point_, psi_vec(self.N, t) @ self.coefs_)
        return out[0] if scalar else out

    def fitted_hyper(self):
        return {"N": self.N}


class TrigFrechetRegressor(CurveRegressor):
    """Trigonometric-projection Frechet regression.

    Projection weights w_i(t) = Psi_N(t)^T Psi_N(x_i)/n, then a
    weighted Frechet minimization at each evaluation point.  With
    N = 1 this is the global Frechet mean.
    """

    method_tag = "trifre"

    def __init__(self, N=3, space=Sphere(2), options=None):
        self.N = N
        self.space = space
        self.options = options

    def fit(self, x, y):
        x, y = self._store_fit_data(x, y)
        if self.N >= len(x):
            raise EstimatorError(f"N >= n (N={self.N}, n={len(x)})")
        return self

    def predict(self, t):
        check_is_fitted(self, "x_")
        t, scalar = check_eval_points(t)
        opts = self._per_point_options()
        out = np.empty((len(t), self.y_.shape[1]))
        for i, ti in enumerate(t):
            w = trifre_weights(self.x_, ti, self.N)
            out[i] = self.space.frechet_argmin(self.y_, w, options=opts)
        return out[0] if scalar else out

    def fitted_hyper(self):
        return {"N": self.N}


class ReflectedRegressor(CurveRegressor):
    """Periodic-extension wrapper: fit on reflected data, predict at t/2.

    Makes estimators that require periodic regression functions (the
    trigonometric ones) applicable to non-periodic curves on [0, 1].
    """

    def __init__(self, base):
        self.base = base

    @property
    def method_tag(self):
        return self.base.method_tag

    @property
    def space(self):
        return self.base.space

    def fit(self, x, y):
        x, y = check_xy(x, y, self.base.space)
        data = reflect_dataset(Dataset(xs=x, ys=y, space=self.base.space))
        self.base.fit(data.xs, data.ys)
        self.fitted_ = True
        return self

    def predict(self, t):
        check_is_fitted(self, "fitted_")
        t = np.asarray(t, dtype=float)
        return self.base.predict(t / 2.0)

    def fitted_hyper(self):
        return dict(self.base.fitted_hyper(), reflected=True)


def reflect_dataset(data):
    """Periodic extension of a dataset on [0, 1].

    Maps covariates x to x/2 and 1 - x/2 with duplicated responses,
    representing t < 1/2 -> m(2t), t >= 1/2 -> m(2 - 2t).  Predictions
    for an original t are taken at t/2.
    """
    lo, hi = data.domain
    if abs(lo) > 1e-12 or abs(hi - 1.0) > 1e-12:
        raise ValueError("reflection is defined for the domain [0, 1]")
    xs = np.concatenate([data.xs / 2.0, 1.0 - data.xs / 2.0])
    ys = np.concatenate([data.ys, data.ys], axis=0)
    order = np.argsort(xs, kind="stable")
    return Dataset(xs=xs[order], ys=ys[order], space=data.space, domain=(0.0, 1.0))


METHODS = {
    cls.method_tag: cls
    for cls in (
        GeodesicRegressor,
        LinearFrechetRegressor,
        CosineRegressor,
        LocalGeodesicRegressor,
        LocalFrechetRegressor,
        TrigGeodesicRegressor,
        TrigFrechetRegressor,
    )
}

# Which constructor keyword the CLI hyperparameter flags map to.
HYPER_PARAM = {
    "locgeo": "h",
    "locfre": "h",
    "trigeo": "N",
    "trifre": "N",
}


def make_estimator(method, hyper=None, space=None, options=None):
    """Build a registered estimator from a method tag and hyper dict."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    hyper = dict(hyper or {})
    kwargs = {}
    if space is not None:
        kwargs["space"] = space
    if options is not None:
        kwargs["options"] = options
    cls = METHODS[method]
    accepted = inspect.signature(cls.__init__).parameters
    for key, value in hyper.items():
        if key in accepted:
            kwargs[key] = value
    return cls(**kwargs)
