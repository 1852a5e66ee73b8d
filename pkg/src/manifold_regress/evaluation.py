"""Monte-Carlo evaluation harness: ISE, LOOCV, MISE tables, rate checks.

Replications are pure functions of (config, replication index): each
one derives an independent RNG stream from the master seed, draws the
regression curve (a fresh random geodesic per replication in the
parametric settings), samples a dataset, fits the requested estimator
(optionally selecting its hyperparameter by leave-one-out
cross-validation on that dataset), and integrates the squared distance
to the truth.  Results are therefore bit-for-bit reproducible and
independent of how replications are scheduled across processes.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimators import METHODS, ReflectedRegressor, make_estimator
from .exceptions import ConfigError, EstimatorError
from .optimize import OptOptions
from .sampling import (
    Simple,
    Spiral,
    curve_point,
    generate_dataset,
    random_geodesic,
    sd_to_contraction,
)
from .spaces import Sphere

H_GRID = (0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5)
N_GRID = (1, 2, 3, 4, 5, 6, 7)

# Which hyperparameter LOOCV tunes, per method, and over which grid.
LOOCV_GRIDS = {
    "locgeo": ("h", H_GRID),
    "locfre": ("h", H_GRID),
    "trifre": ("N", N_GRID),
}

CURVES = ("simple", "spiral", "geodesic")

# Lighter optimizer settings for the n-fold LOOCV scans; selection only
# needs to rank candidates, the final fit runs at full settings.
LOOCV_OPTIONS = {
    "locgeo": OptOptions(coarse_grid_size=64, refine_iters=60, refine_top=1),
    "locfre": OptOptions(coarse_grid_size=64, refine_iters=80),
    "trifre": OptOptions(coarse_grid_size=64, refine_iters=80),
}


def ise(space, estimate, truth, ts):
    """Integrated squared distance between two sampled curves (trapezoid)."""
    d = space.dist(np.asarray(estimate, dtype=float), np.asarray(truth, dtype=float))
    return float(np.trapezoid(d * d, np.asarray(ts, dtype=float)))


def resolve_curve(curve, speed, rng):
    """Instantiate a named regression curve; 'geodesic' draws from rng."""
    if curve == "simple":
        return Simple()
    if curve == "spiral":
        return Spiral()
    if curve == "geodesic":
        return random_geodesic(speed, rng)
    raise ConfigError(f"curve: unknown curve {curve!r}; choose from {CURVES}")


def loocv_select(xs, ys, space, factory, candidates):
    """Pick the candidate minimizing leave-one-out squared distance.

    factory(c) must return a fresh unfitted estimator for candidate c.
    Returns (best_candidate, scores, failures); scores maps candidates
    to mean held-out squared distance, failures maps candidates that
    raised to the error message.  Ties resolve to the earliest
    candidate.  Raises EstimatorError when every candidate fails.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(xs)
    scores = {}
    failures = {}
    for cand in candidates:
        total = 0.0
        try:
            for i in range(n):
                est = factory(cand)
                est.fit(np.delete(xs, i), np.delete(ys, i, axis=0))
                pred = est.predict(xs[i])
                total += float(space.dist(pred, ys[i]) ** 2)
        except (EstimatorError, ValueError, np.linalg.LinAlgError) as err:
            failures[cand] = str(err)
            continue
        scores[cand] = total / n
    if not scores:
        detail = "; ".join(f"{c}: {msg}" for c, msg in failures.items())
        raise EstimatorError(f"LOOCV failed for every candidate ({detail})")
    best = min(scores, key=lambda c: (scores[c], list(candidates).index(c)))
    # min() already keeps the earliest key on exact ties because dict
    # preserves insertion order; the explicit index makes that intent
    # robust to future reordering.
    return best, scores, failures


@dataclass
class ExperimentConfig:
    """One Monte-Carlo cell: a (curve, n, sd) setting and a method."""

    method: str
    curve: str
    n: int
    sd: float
    reps: int
    seed: int
    speed: float = 1.0
    hyper: dict = field(default_factory=dict)
    loocv: bool = False
    reflect: str = "auto"
    grid_size: int = 101
    threads: int = 1
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(
                f"method: unknown method {self.method!r}; choose from {sorted(METHODS)}"
            )
        if self.curve not in CURVES:
            raise ConfigError(f"curve: unknown curve {self.curve!r}; choose from {CURVES}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 4:
            raise ConfigError("n: need an integer sample size of at least 4")
        try:
            sd_to_contraction(self.sd)
        except ValueError as err:
            raise ConfigError(f"sd: {err}") from err
        if not isinstance(self.reps, (int, np.integer)) or self.reps < 1:
            raise ConfigError("reps: need a positive integer replication count")
        if not np.isfinite(self.speed):
            raise ConfigError("speed: must be finite")
        if self.loocv and self.method not in LOOCV_GRIDS:
            raise ConfigError(
                f"loocv: method {self.method!r} has no cross-validated hyperparameter"
            )
        if self.reflect not in ("auto", "on", "off"):
            raise ConfigError("reflect: choose from 'auto', 'on', 'off'")
        if self.grid_size < 2:
            raise ConfigError("grid_size: need at least 2 evaluation points")
        if self.threads < 1:
            raise ConfigError("threads: need a positive worker count")
        lo, hi = self.domain
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ConfigError("domain: need finite bounds with lo < hi")


def should_reflect(method, curve_model, mode="auto"):
    """Periodic extension applies to the trigonometric estimators on
    non-periodic curves; 'on'/'off' force the choice."""
    if mode == "on":
        return True
    if mode == "off":
        return False
    return method in ("trigeo", "trifre") and not curve_model.periodic


def fit_estimator(config, xs, ys, curve_model, space=None):
    """Fit config.method to (xs, ys), with optional LOOCV and reflection.

    Returns (fitted estimator, hyper dict actually used).
    """
    space = space if space is not None else Sphere(2)
    reflected = should_reflect(config.method, curve_model, config.reflect)
    hyper = dict(config.hyper)

    def build(extra=None, options=None):
        est = make_estimator(
            config.method, dict(hyper, **(extra or {})), space=space, options=options
        )
        return ReflectedRegressor(est) if reflected else est

    if config.loocv:
        name, grid = LOOCV_GRIDS[config.method]
        light = LOOCV_OPTIONS[config.method]
        best, _, _ = loocv_select(
            xs, ys, space, lambda c: build({name: c}, options=light), grid
        )
        hyper[name] = best
    est = build()
    est.fit(xs, ys)
    info = dict(est.fitted_hyper())
    info.setdefault("reflected", reflected)
    return est, info


def _run_rep(config, rep):
    """One replication: draw, fit, integrate squared error.  Pure."""
    ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(rep,))
    rng = np.random.default_rng(ss)
    curve_model = resolve_curve(config.curve, config.speed, rng)
    data = generate_dataset(
        curve_model, config.n, sd_to_contraction(config.sd), config.domain, rng
    )
    est, _ = fit_estimator(config, data.xs, data.ys, curve_model, data.space)
    ts = np.linspace(config.domain[0], config.domain[1], config.grid_size)
    return ise(data.space, est.predict(ts), curve_point(curve_model, ts), ts)


def run_mise(config):
    """Mean integrated squared error over config.reps replications.

    Returns {'mise', 'se', 'per_rep'}; the per-replication ISE vector
    is identical for any thread count because replication r depends
    only on (config, r) and aggregation runs in replication order.
    """
    reps = range(config.reps)
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            per_rep = list(pool.map(_run_rep, [config] * config.reps, reps))
    else:
        per_rep = [_run_rep(config, rep) for rep in reps]
    per_rep = np.asarray(per_rep, dtype=float)
    se = float(np.std(per_rep, ddof=1) / np.sqrt(config.reps)) if config.reps > 1 else 0.0
    return {"mise": float(np.mean(per_rep)), "se": se, "per_rep": per_rep}


@dataclass
class RateCheckConfig:
    """A sample-size ladder sharing one Monte-Carlo setting."""

    method: str
    curve: str
    sd: float
    ladder: tuple
    reps: int
    seed: int
    speed: float = 1.0
    hyper: dict = field(default_factory=dict)
    loocv: bool = False
    reflect: str = "auto"
    grid_size: int = 101
    threads: int = 1
    domain: tuple = (0.0, 1.0)
    target_slope: float = None

    def __post_init__(self):
        ladder = tuple(self.ladder)
        if len(ladder) < 3:
            raise ConfigError("ladder: need at least three sample sizes")
        if any((not isinstance(n, (int, np.integer))) or n < 4 for n in ladder):
            raise ConfigError("ladder: entries must be integers of at least 4")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("ladder: sample sizes must increase strictly")
        self.ladder = ladder
        # Reuse the per-cell validation for the shared fields.
        self._cell(ladder[0])

    def _cell(self, n):
        return ExperimentConfig(
            method=self.method,
            curve=self.curve,
            n=int(n),
            sd=self.sd,
            reps=self.reps,
            seed=self.seed,
            speed=self.speed,
            hyper=dict(self.hyper),
            loocv=self.loocv,
            reflect=self.reflect,
            grid_size=self.grid_size,
            threads=self.threads,
            domain=self.domain,
        )


def rate_check(config):
    """Least-squares slope of log(MISE) against log(n) along the ladder.

    A noiseless run (sd = 0) measures only the optimizer's noise floor,
    so the slope is reported but flagged degenerate.
    """
    mises = [run_mise(config._cell(n))["mise"] for n in config.ladder]
    ns = np.asarray(config.ladder, dtype=float)
    floor = 1e-12
    degenerate = config.sd == 0.0 or any(m <= floor for m in mises)
    slope = float(np.polyfit(np.log(ns), np.log(np.maximum(mises, floor)), 1)[0])
    return {
        "slope": slope,
        "mises": mises,
        "ns": [int(n) for n in config.ladder],
        "degenerate": degenerate,
        "target_slope": config.target_slope,
    }
