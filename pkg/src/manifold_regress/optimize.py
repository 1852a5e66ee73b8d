"""Derivative-free minimization over spheres, tangent bundles, boxes, and intervals.

Every routine is a two-stage scheme: a deterministic coarse search
(grid or stratified starts) followed by Nelder-Mead refinement with
standard coefficients (reflection 1, expansion 2, contraction 0.5,
shrink 0.5) and initial simplex edge 0.1.  Results are deterministic
given the options' seed, and the returned value never exceeds the best
coarse-stage value.

Sphere and tangent-bundle objectives must be vectorized: they take
arrays whose leading axis enumerates candidate points and return a 1-D
array of values.  Scalar and box objectives take a single argument.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .geometry import exp_map, project_tangent, tangent_basis

_SIMPLEX_EDGE = 0.1
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class OptOptions:
    """Tuning knobs for the optimizers; defaults suit S^2 problems."""

    coarse_grid_size: int = 512
    refine_iters: int = 200
    tol: float = 1e-9
    n_starts: int = 8
    seed: int = 0
    refine_top: int = 3

    def __post_init__(self):
        if min(self.coarse_grid_size, self.refine_iters, self.n_starts, self.refine_top) <= 0:
            raise ValueError("optimizer options must be positive")
        if self.tol <= 0:
            raise ValueError("optimizer tolerance must be positive")


_DEFAULTS = OptOptions()


def fibonacci_sphere(n):
    """Deterministic near-uniform lattice of n points on S^2."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = i * (np.pi * (3.0 - np.sqrt(5.0)))
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def _sphere_grid(size, dim, seed):
    if dim == 3:
        return fibonacci_sphere(size)
    if dim == 2:
        ang = np.arange(size) * (2.0 * np.pi / size)
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((size, dim))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def _nelder_mead(f, x0, maxiter, tol):
    simplex = np.vstack([x0, x0 + _SIMPLEX_EDGE * np.eye(x0.size)])
    res = _scipy_minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxiter": maxiter,
            "maxfev": 2 * maxiter + 2 * x0.size,
            "fatol": tol,
            "xatol": 1e-6,
        },
    )
    return res.x, float(res.fun)


def minimize_on_sphere(f, k=2, options=None, seeds=None):
    """Minimize f over S^k; returns (point, value).

    Stage 1 evaluates f on a deterministic coarse grid (Fibonacci
    lattice for S^2) plus any caller-provided seed points; stage 2 runs
    Nelder-Mead in the tangent chart at the best candidate.
    """
    opts = options or _DEFAULTS
    dim = k + 1
    cand = _sphere_grid(opts.coarse_grid_size, dim, opts.seed)
    if seeds is not None and len(seeds):
        seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
        seeds = seeds / np.linalg.norm(seeds, axis=-1, keepdims=True)
        cand = np.vstack([cand, seeds])
    vals = np.asarray(f(cand), dtype=float)
    best = int(np.argmin(vals))
    q0, f0 = cand[best], float(vals[best])

    basis = tangent_basis(q0)

    def chart(alpha):
        return float(f(exp_map(q0, alpha @ basis)[np.newaxis])[0])

    alpha, fr = _nelder_mead(chart, np.zeros(k), opts.refine_iters, opts.tol)
    if fr <= f0:
        q = exp_map(q0, alpha @ basis)
        q = q / np.linalg.norm(q)
        return q, fr
    return q0, f0


def minimize_on_tangent_bundle(f, k=2, vmax=np.pi, options=None, seeds=None):
    """Minimize f(p, v) over (p, v) with p on S^k, v tangent at p, |v| <= vmax.

    Stage 1 scores a coarse product grid (sphere lattice x seeded random
    tangent vectors, plus the zero vector and any caller seeds); stage 2
    refines the best candidates by Nelder-Mead in a 2k-dimensional
    chart, re-projecting v onto the tangent space at the updated p and
    clamping |v| to vmax.  Returns ((p, v), value).
    """
    if vmax <= 0:
        raise ValueError("vmax must be positive")
    opts = options or _DEFAULTS
    dim = k + 1
    n_p = max(16, opts.coarse_grid_size // 8)
    n_v = 12
    grid = _sphere_grid(n_p, dim, opts.seed)
    rng = np.random.default_rng(opts.seed)
    raw = rng.standard_normal((n_p, n_v, dim))
    raw = project_tangent(grid[:, np.newaxis, :], raw)
    raw /= np.linalg.norm(raw, axis=-1, keepdims=True)
    radii = vmax * rng.random((n_p, n_v, 1))
    vs = np.concatenate([np.zeros((n_p, 1, dim)), radii * raw], axis=1)
    ps = np.broadcast_to(grid[:, np.newaxis, :], vs.shape)
    cand_p = ps.reshape(-1, dim)
    cand_v = vs.reshape(-1, dim)
    if seeds:
        seed_p = np.array([p for p, _ in seeds], dtype=float)
        seed_p /= np.linalg.norm(seed_p, axis=-1, keepdims=True)
        seed_v = project_tangent(seed_p, np.array([v for _, v in seeds], dtype=float))
        norms = np.linalg.norm(seed_v, axis=-1, keepdims=True)
        seed_v = np.where(norms > vmax, seed_v * (vmax / np.where(norms > 0, norms, 1.0)), seed_v)
        cand_p = np.vstack([cand_p, seed_p])
        cand_v = np.vstack([cand_v, seed_v])
    vals = np.asarray(f(cand_p, cand_v), dtype=float)
    order = np.argsort(vals, kind="stable")
    f0 = float(vals[order[0]])

    n_refine = min(opts.refine_top, len(order))
    best_pair = (cand_p[order[0]], cand_v[order[0]])
    best_val = f0
    for idx in order[:n_refine]:
        p0, v0 = cand_p[idx], cand_v[idx]
        basis = tangent_basis(p0)

        def decode(z, p0=p0, v0=v0, basis=basis):
            p = exp_map(p0, z[:k] @ basis)
            p = p / np.linalg.norm(p)
            v = project_tangent(p, v0 + z[k:] @ basis)
            norm = np.linalg.norm(v)
            if norm > vmax:
                v = v * (vmax / norm)
            return p, v

        def chart(z, decode=decode):
            p, v = decode(z)
            return float(f(p[np.newaxis], v[np.newaxis])[0])

        z, fr = _nelder_mead(chart, np.zeros(2 * k), opts.refine_iters, opts.tol)
        if fr < best_val:
            best_val = fr
            best_pair = decode(z)
    return best_pair, best_val


def minimize_scalar(f, lo, hi, options=None, xtol=1e-8):
    """Minimize a scalar function on [lo, hi]; returns (argmin, value).

    A 64-point grid locates the best cell, then golden-section search
    refines inside the neighbouring cells to argument tolerance xtol.
    """
    if not lo < hi:
        raise ValueError("scalar minimization needs lo < hi")
    xs = np.linspace(lo, hi, 64)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmin(vals))
    best_x, best_f = float(xs[i]), float(vals[i])
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    for x, v in ((c, fc), (d, fd)):
        if v < best_f:
            best_x, best_f = float(x), float(v)
    return best_x, best_f


def minimize_box(f, bounds, options=None, seeds=None):
    """Minimize f over a box; returns (argmin, value).

    Runs Nelder-Mead from n_starts stratified (Latin-hypercube) starts
    plus any caller-provided seed vectors; evaluation points are clipped
    into the box.
    """
    opts = options or _DEFAULTS
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2 or not np.all(np.isfinite(bounds)):
        raise ValueError("bounds must be a finite (dims, 2) array")
    lo, hi = bounds[:, 0], bounds[:, 1]
    dims = len(bounds)
    rng = np.random.default_rng(opts.seed)
    strata = np.empty((opts.n_starts, dims))
    for j in range(dims):
        strata[:, j] = (rng.permutation(opts.n_starts) + rng.random(opts.n_starts)) / opts.n_starts
    starts = [lo + s * (hi - lo) for s in strata]
    if seeds is not None:
        starts = [np.clip(np.asarray(s, dtype=float), lo, hi) for s in seeds] + starts

    def clipped(z):
        return float(f(np.clip(z, lo, hi)))

    best_x, best_f = None, np.inf
    for x0 in starts:
        z, fr = _nelder_mead(clipped, np.asarray(x0, dtype=float), opts.refine_iters, opts.tol)
        if fr < best_f:
            best_x, best_f = np.clip(z, lo, hi), fr
    return best_x, best_f
