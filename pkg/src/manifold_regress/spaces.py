"""Metric spaces the estimators run on: the sphere and a Euclidean oracle.

Every Frechet-type estimator is written against this minimal
interface: a metric, an exponential map, and weighted least-squares
minimizers (pointwise and geodesic).  The Euclidean instance solves
both minimizations in closed form, which makes it an oracle for the
numerical pipeline used on the sphere.  Weights may be negative.
"""

import numpy as np

from . import geometry
from .optimize import OptOptions, minimize_on_sphere, minimize_on_tangent_bundle


def weighted_frechet_objective(space, points, weights, q):
    """Sum of w_i * d(y_i, q)^2; weights may be negative."""
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if len(points) != len(weights):
        raise ValueError("points and weights must have equal length")
    d = space.dist(points, np.asarray(q, dtype=float))
    return float(weights @ (d * d))


def euclidean_weighted_argmin(points, weights):
    """Closed-form minimizer of sum w_i |y_i - q|^2: the weighted mean.

    Requires sum(w_i) > 0; individual weights may be negative.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if len(points) != len(weights):
        raise ValueError("points and weights must have equal length")
    total = weights.sum()
    if total <= 1e-12:
        raise ValueError(f"weight sum must be positive, got {total:g}")
    return (weights @ points.reshape(len(points), -1) / total).reshape(points.shape[1:])


class Euclidean:
    """R^d with the usual norm; all minimizers are closed-form."""

    def __init__(self, dim=1):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        self.dim = int(dim)

    def __repr__(self):
        return f"Euclidean({self.dim})"

    def __eq__(self, other):
        return isinstance(other, Euclidean) and other.dim == self.dim

    def check_points(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise ValueError(f"points of dimension {points.shape[-1]} in {self}")
        return points

    def dist(self, a, b):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return np.linalg.norm(a - b, axis=-1)

    def exp(self, base, vec):
        return np.asarray(base, dtype=float) + np.asarray(vec, dtype=float)

    def frechet_argmin(self, points, weights, options=None, seeds=None):
        return euclidean_weighted_argmin(points, weights)

    def geodesic_argmin(self, xs, points, weights, vmax=None, options=None, seeds=None):
        """Weighted least squares of points on (1, x): returns (p, v).

        Minimizes sum w_i |y_i - (p + x_i v)|^2 coordinatewise.
        """
        xs = np.asarray(xs, dtype=float)
        points = self.check_points(points)
        weights = np.asarray(weights, dtype=float)
        design = np.stack([np.ones_like(xs), xs], axis=-1)
        gram = (design * weights[:, np.newaxis]).T @ design
        rhs = (design * weights[:, np.newaxis]).T @ points
        coef = np.linalg.solve(gram, rhs)
        return coef[0], coef[1]


class Sphere:
    """S^k with the intrinsic metric; minimizers run the global optimizer."""

    def __init__(self, k=2):
        if k < 1:
            raise ValueError("sphere dimension k must be at least 1")
        self.k = int(k)
        self.dim = k + 1

    def __repr__(self):
        return f"Sphere({self.k})"

    def __eq__(self, other):
        return isinstance(other, Sphere) and other.k == self.k

    def check_points(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise ValueError(f"points of dimension {points.shape[-1]} in {self}")
        return geometry.as_point(points)

    def dist(self, a, b):
        return geometry.dist(a, b)

    def exp(self, base, vec):
        return geometry.exp_map(base, vec)

    def frechet_argmin(self, points, weights, options=None, seeds=None):
        """Minimize sum w_i d(y_i, q)^2 over the sphere."""
        points = np.asarray(points, dtype=float)
        weights = np.asarray(weights, dtype=float)

        def objective(q):
            inner = np.clip(points @ q.T, -1.0, 1.0)
            d = np.arccos(inner)
            return weights @ (d * d)

        if seeds is None:
            mean = weights @ points
            norm = np.linalg.norm(mean)
            seeds = mean[np.newaxis] / norm if norm > 1e-9 else None
        point, _ = minimize_on_sphere(objective, self.k, options, seeds)
        return point

    def geodesic_argmin(self, xs, points, weights, vmax=np.pi, options=None, seeds=None):
        """Minimize sum w_i d(y_i, Exp(p, x_i v))^2; returns (p, v)."""
        xs = np.asarray(xs, dtype=float)
        points = np.asarray(points, dtype=float)
        weights = np.asarray(weights, dtype=float)

        def objective(p, v):
            # p, v: (m, dim); curves evaluated at every x_i per candidate.
            norm = np.linalg.norm(v, axis=-1)
            unit = np.where(norm[:, np.newaxis] > 0.0, v / np.where(norm[:, np.newaxis] > 0.0, norm[:, np.newaxis], 1.0), 0.0)
            ang = xs[np.newaxis, :] * norm[:, np.newaxis]
            curve = (
                np.cos(ang)[:, :, np.newaxis] * p[:, np.newaxis, :]
                + np.sin(ang)[:, :, np.newaxis] * unit[:, np.newaxis, :]
            )
            inner = np.clip(np.einsum("mnd,nd->mn", curve, points), -1.0, 1.0)
            d = np.arccos(inner)
            return (d * d) @ weights

        if seeds is None:
            seeds = geodesic_candidates(xs, points, weights, vmax)
        return minimize_on_tangent_bundle(objective, self.k, vmax, options, seeds)[0]


def geodesic_candidates(xs, points, weights, vmax, great_circle=True):
    """Data-driven starting pairs (p, v) for geodesic fits on the sphere.

    Two constructions: a weighted tangent-space linear fit at the
    weighted extrinsic mean (good for slow curves), and a best-fit
    great circle with a grid-searched phase/speed (robust for fast,
    wrapping curves; skipped when great_circle is false, as local fits
    never wrap).  Both are deterministic.
    """
    xs = np.asarray(xs, dtype=float)
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    seeds = []

    wpos = np.maximum(weights, 0.0)
    total = wpos.sum()
    if total <= 0:
        wpos = np.full(len(xs), 1.0 / len(xs))
        total = 1.0
    mean = wpos @ points / total
    norm = np.linalg.norm(mean)
    if norm > 1e-9:
        p0 = mean / norm
        try:
            logs = geometry.log_map(p0, points)
        except geometry.AntipodalPointsError:
            logs = None
        if logs is not None:
            design = np.stack([np.ones_like(xs), xs], axis=-1)
            gram = (design * wpos[:, np.newaxis]).T @ design
            if abs(np.linalg.det(gram)) > 1e-12:
                coef = np.linalg.solve(gram, (design * wpos[:, np.newaxis]).T @ logs)
                p1 = geometry.exp_map(p0, coef[0])
                v1 = geometry.project_tangent(p1, coef[1])
                vn = np.linalg.norm(v1)
                if vn > vmax:
                    v1 *= vmax / vn
                seeds.append((p1, v1))
        seeds.append((p0, np.zeros_like(p0)))

    if great_circle and points.shape[-1] == 3 and len(xs) >= 3:
        seeds.extend(_great_circle_candidates(xs, points, wpos, vmax))
    return seeds


def _great_circle_candidates(xs, points, weights, vmax):
    """Phase/speed grid search on the best-fit great circle (S^2 only)."""
    scatter = (points * weights[:, np.newaxis]).T @ points
    eigvals, eigvecs = np.linalg.eigh(scatter)
    normal = eigvecs[:, 0]
    b1, b2 = geometry.tangent_basis(normal)
    speeds = np.linspace(-vmax, vmax, 129)
    phases = np.linspace(0.0, 2.0 * np.pi, 32, endpoint=False)
    ang = phases[:, np.newaxis, np.newaxis] + speeds[np.newaxis, :, np.newaxis] * xs
    curve = (
        np.cos(ang)[..., np.newaxis] * b1
        + np.sin(ang)[..., np.newaxis] * b2
    )
    inner = np.clip(np.einsum("psnd,nd->psn", curve, points), -1.0, 1.0)
    d = np.arccos(inner)
    obj = (d * d) @ weights
    pi, si = np.unravel_index(np.argmin(obj), obj.shape)
    c, s = phases[pi], speeds[si]
    p = np.cos(c) * b1 + np.sin(c) * b2
    v = s * (-np.sin(c) * b1 + np.cos(c) * b2)
    return [(p, v)]
