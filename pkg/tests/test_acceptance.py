"""Acceptance gate: nine end-to-end criteria with runtime budgets.

Each criterion prints one PASS/FAIL line (collected again in the
terminal summary) and asserts both its statistical condition and its
wall-clock budget. Replication counts follow the desk-scale protocol:
published table values are reproduced within widened, standard-error
aware bands rather than to the digit.
"""

import json
import time

import numpy as np
from click.testing import CliRunner

import oracles
from conftest import record_acceptance
from manifold_regress import geometry
from manifold_regress.cli import cli
from manifold_regress.estimators import (
    LinearFrechetRegressor,
    LocalFrechetRegressor,
    TrigFrechetRegressor,
)
from manifold_regress.evaluation import ExperimentConfig, RateCheckConfig, rate_check, run_mise
from manifold_regress.sampling import sample_cntr_unif
from manifold_regress.spaces import Euclidean, Sphere
from manifold_regress.weights import KernelSpec, local_poly_weights, psi_vec

SEED = 20260821


def random_points(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_tangents(rng, points, max_norm):
    raw = rng.standard_normal(points.shape)
    rej = raw - np.sum(raw * points, axis=-1, keepdims=True) * points
    unit = rej / np.linalg.norm(rej, axis=-1, keepdims=True)
    radii = rng.uniform(0.0, max_norm, len(points))
    return unit * radii[:, np.newaxis]


def test_criterion_1_geometry_properties():
    t0 = time.monotonic()
    rng = np.random.default_rng(SEED)
    violations = []

    p = random_points(rng, 10_000)
    v = random_tangents(rng, p, np.pi - 1e-9)
    q = geometry.exp_map(p, v)
    back = geometry.log_map(p, q)
    violations.append(int(np.sum(np.linalg.norm(back - v, axis=-1) > 1e-9)))

    # Geodesic speed: dist(p, Exp(p, s v)) == s |v| up to the cut locus.
    s = rng.uniform(0.0, 1.0, len(p))
    speed_err = np.abs(
        geometry.dist(p, geometry.exp_map(p, s[:, np.newaxis] * v))
        - s * np.linalg.norm(v, axis=-1)
    )
    violations.append(int(np.sum(speed_err > 1e-10)))

    # Distance upper bound: d(Exp(q, v), Exp(p, u)) admits the linear
    # bound (pi/2)|q - p| + 2 pi |v - u| in chart coordinates.
    q2 = random_points(rng, 10_000)
    p2 = random_points(rng, 10_000)
    v2 = random_tangents(rng, q2, np.pi)
    u2 = random_tangents(rng, p2, np.pi)
    lhs = geometry.dist(geometry.exp_map(q2, v2), geometry.exp_map(p2, u2))
    rhs = (np.pi / 2) * np.linalg.norm(q2 - p2, axis=-1) + 2 * np.pi * np.linalg.norm(
        v2 - u2, axis=-1
    )
    violations.append(int(np.sum(lhs > rhs + 1e-12)))

    # Integral lower bound with the provable constant 4/pi^2 on the
    # tangent term (the straight-line substitution loses a factor 2,
    # and the antiparallel extreme caps the constant at 2 pi^2 / 3 / pi^2,
    # so 8/pi^2 is unattainable; see the project decision log).
    p3 = random_points(rng, 1000)
    q3 = random_points(rng, 1000)
    u3 = random_tangents(rng, p3, np.pi / 2)
    v3 = random_tangents(rng, q3, np.pi / 2)
    xs = np.linspace(-1.0, 1.0, 1001)
    cp = geometry.exp_map(p3[:, np.newaxis], xs[np.newaxis, :, np.newaxis] * u3[:, np.newaxis])
    cq = geometry.exp_map(q3[:, np.newaxis], xs[np.newaxis, :, np.newaxis] * v3[:, np.newaxis])
    integral = np.trapezoid(geometry.dist(cp, cq) ** 2, xs, axis=-1)
    bound = (2 / np.pi) * np.sum((p3 - q3) ** 2, axis=-1) + (4 / np.pi**2) * np.sum(
        (v3 - u3) ** 2, axis=-1
    )
    violations.append(int(np.sum(integral < bound - 1e-6)))

    elapsed = time.monotonic() - t0
    ok = sum(violations) == 0 and elapsed < 10.0
    record_acceptance(
        "criterion 1 (geometry properties)",
        ok,
        f"violations {violations} (round-trip, speed, upper bound, integral bound), "
        f"elapsed {elapsed:.1f}s < 10s",
    )


def test_criterion_2_noise_model():
    t0 = time.monotonic()
    rng = np.random.default_rng(SEED)
    m = np.array([0.0, 0.0, 1.0])
    checks = []
    for a in (0.25, 0.5, 0.75):
        ys = sample_cntr_unif(np.tile(m, (100_000, 1)), a, rng)
        d2 = geometry.dist(ys, m) ** 2
        target = 0.5 * (np.pi**2 - 4.0) * a**2
        se = float(np.std(d2, ddof=1) / np.sqrt(len(d2)))
        checks.append((a, float(np.mean(d2)), target, se))
    mean_ok = all(abs(mean - target) <= 3 * se for _, mean, target, se in checks)

    ys = sample_cntr_unif(np.tile(m, (4000, 1)), 0.5, rng)
    center = Sphere(2).frechet_argmin(ys, np.full(len(ys), 1.0 / len(ys)))
    recovery = float(geometry.dist(center, m))

    elapsed = time.monotonic() - t0
    ok = mean_ok and recovery < 0.05 and elapsed < 30.0
    detail = "; ".join(
        f"a={a}: |{mean:.5f}-{target:.5f}| vs 3se={3 * se:.5f}" for a, mean, target, se in checks
    )
    record_acceptance(
        "criterion 2 (noise model)",
        ok,
        f"{detail}; mean recovery {recovery:.4f} < 0.05 rad, elapsed {elapsed:.1f}s < 30s",
    )


def test_criterion_3_weight_identities():
    t0 = time.monotonic()
    violations = 0

    # Local polynomial weights: normalization, support, annihilation,
    # on the endpoint-inclusive equispaced design (the i/n design is
    # singular at t=0 with a one-point window).
    cases = [(n, h, 1) for n in (20, 80) for h in (0.1, 0.3)]
    cases += [(80, h, order) for h in (0.2, 0.3) for order in (2, 3)]
    for n, h, order in cases:
        xs = np.linspace(0.0, 1.0, n)
        for t in np.linspace(0.0, 1.0, 11):
            wv = local_poly_weights(xs, t, order, KernelSpec("epanechnikov", h))
            w = wv.w
            if abs(np.sum(w) - 1.0) > 1e-10:
                violations += 1
            if np.any((w != 0.0) & (np.abs(xs - t) > h)):
                violations += 1
            for j in range(1, order + 1):
                if abs(np.sum(w * (xs - t) ** j)) / h**j > 1e-8:
                    violations += 1

    # Discrete trigonometric orthonormality on the i/n design.
    for n in (8, 32):
        xs = np.arange(1, n + 1) / n
        psi = psi_vec(7, xs)
        gram = psi.T @ psi / n
        if np.max(np.abs(gram - np.eye(7))) > 1e-10:
            violations += 1

    # Bessel: empirical coefficient energy never exceeds signal energy.
    rng = np.random.default_rng(SEED)
    xs = np.arange(1, 33) / 32
    psi = psi_vec(7, xs)
    for _ in range(100):
        f = rng.standard_normal(32)
        coef = psi.T @ f / 32
        if np.sum(coef**2) > np.mean(f**2) + 1e-12:
            violations += 1

    elapsed = time.monotonic() - t0
    ok = violations == 0 and elapsed < 5.0
    record_acceptance(
        "criterion 3 (weight identities)",
        ok,
        f"{violations} violations, elapsed {elapsed:.1f}s < 5s",
    )


def test_criterion_4_euclidean_oracles():
    t0 = time.monotonic()
    rng = np.random.default_rng(SEED)
    space = Euclidean(1)
    ts = np.linspace(0.05, 0.95, 9)
    worst = {"linfre": 0.0, "locfre": 0.0, "trifre": 0.0}
    for _ in range(50):
        n = int(rng.integers(15, 41))
        xs = np.sort(rng.uniform(0.0, 1.0, n))
        ys = rng.standard_normal((n, 1))

        est = LinearFrechetRegressor(space=space).fit(xs, ys)
        oracle = np.array([oracles.ols_predict(xs, ys[:, 0], t) for t in ts])
        worst["linfre"] = max(worst["linfre"], float(np.max(np.abs(est.predict(ts)[:, 0] - oracle))))

        est = LocalFrechetRegressor(h=0.3, order=1, space=space).fit(xs, ys)
        oracle = np.array([oracles.local_poly_predict(xs, ys[:, 0], t, 0.3) for t in ts])
        worst["locfre"] = max(worst["locfre"], float(np.max(np.abs(est.predict(ts)[:, 0] - oracle))))

        # The projection identity needs the equispaced i/n design.
        xs_eq = np.arange(1, n + 1) / n
        ys_eq = rng.standard_normal((n, 1))
        est = TrigFrechetRegressor(N=5, space=space).fit(xs_eq, ys_eq)
        oracle = np.array([oracles.projection_predict(xs_eq, ys_eq[:, 0], t, 5) for t in ts])
        worst["trifre"] = max(worst["trifre"], float(np.max(np.abs(est.predict(ts)[:, 0] - oracle))))

    elapsed = time.monotonic() - t0
    ok = all(v < 1e-4 for v in worst.values()) and elapsed < 60.0
    record_acceptance(
        "criterion 4 (euclidean oracles)",
        ok,
        f"worst |est - oracle|: linfre {worst['linfre']:.2e}, locfre {worst['locfre']:.2e}, "
        f"trifre {worst['trifre']:.2e} (all < 1e-4), elapsed {elapsed:.1f}s < 60s",
    )


def _mise(method, curve, n, sd, reps, speed=1.0, loocv=False, hyper=None):
    config = ExperimentConfig(
        method=method, curve=curve, n=n, sd=sd, reps=reps, seed=SEED,
        speed=speed, loocv=loocv, hyper=hyper or {},
    )
    return run_mise(config)["mise"]


def test_criterion_5_parametric_mise():
    t0 = time.monotonic()
    low = {m: _mise(m, "geodesic", 100, 0.1, 200) for m in ("lingeo", "linfre", "lincos")}
    high = {m: _mise(m, "geodesic", 100, 1.0, 200) for m in ("lingeo", "linfre", "lincos")}
    elapsed = time.monotonic() - t0
    low_ok = all(1e-4 <= v <= 4e-4 for v in low.values())
    high_ok = all(0.015 <= v <= 0.075 for v in high.values())
    ok = low_ok and high_ok and elapsed < 900.0
    fmt = lambda d: ", ".join(f"{k} {v:.5f}" for k, v in d.items())
    record_acceptance(
        "criterion 5 (parametric MISE, 200 reps)",
        ok,
        f"sd=0.1: {fmt(low)} in [1e-4, 4e-4]; sd=1.0: {fmt(high)} in [0.015, 0.075]; "
        f"elapsed {elapsed:.0f}s < 900s",
    )


def test_criterion_6_linfre_inconsistency():
    t0 = time.monotonic()
    vals = {m: _mise(m, "geodesic", 100, 0.1, 100, speed=8.0) for m in ("linfre", "lingeo", "lincos")}
    elapsed = time.monotonic() - t0
    ok = (
        vals["linfre"] > 1.0
        and vals["lingeo"] < 0.001
        and vals["lincos"] < 0.001
        and elapsed < 600.0
    )
    record_acceptance(
        "criterion 6 (speed-8 contrast, 100 reps)",
        ok,
        f"linfre {vals['linfre']:.4f} > 1.0, lingeo {vals['lingeo']:.6f} < 0.001, "
        f"lincos {vals['lincos']:.6f} < 0.001, elapsed {elapsed:.0f}s < 600s",
    )


def test_criterion_7_nonparametric_mise():
    t0 = time.monotonic()
    simple = {
        "locfre": (_mise("locfre", "simple", 80, 0.25, 100, loocv=True), 0.00731),
        "trifre": (_mise("trifre", "simple", 80, 0.25, 100, loocv=True), 0.00662),
        "locgeo": (_mise("locgeo", "simple", 80, 0.25, 100, loocv=True), 0.00851),
    }
    locfre_spiral = _mise("locfre", "spiral", 80, 0.25, 100, loocv=True)
    trigeo_spiral = _mise("trigeo", "spiral", 80, 0.25, 100)
    elapsed = time.monotonic() - t0
    bands_ok = all(ref / 2 < got < ref * 2 for got, ref in simple.values())
    contrast_ok = trigeo_spiral > 5.0 * locfre_spiral
    ok = bands_ok and contrast_ok and elapsed < 3600.0
    detail = ", ".join(f"{m} {got:.5f} vs {ref:.5f}" for m, (got, ref) in simple.items())
    record_acceptance(
        "criterion 7 (nonparametric MISE, 100 reps, LOOCV)",
        ok,
        f"simple within factor 2: {detail}; spiral trigeo {trigeo_spiral:.5f} > "
        f"5 x locfre {locfre_spiral:.5f}; elapsed {elapsed:.0f}s < 3600s",
    )


def test_criterion_8_rate_checks():
    t0 = time.monotonic()
    lingeo = rate_check(RateCheckConfig(
        method="lingeo", curve="geodesic", sd=0.5, ladder=(25, 50, 100, 200),
        reps=200, seed=SEED, speed=1.0, target_slope=-1.0,
    ))
    locfre = rate_check(RateCheckConfig(
        method="locfre", curve="simple", sd=0.5, ladder=(25, 50, 100, 200),
        reps=200, seed=SEED, hyper={"h": 0.2},
    ))
    elapsed = time.monotonic() - t0
    slope_ok = -1.4 <= lingeo["slope"] <= -0.6
    mono_ok = all(a > b for a, b in zip(locfre["mises"], locfre["mises"][1:]))
    ok = slope_ok and mono_ok and elapsed < 1200.0
    mises = ", ".join(f"{m:.5f}" for m in locfre["mises"])
    record_acceptance(
        "criterion 8 (rate checks, 200 reps)",
        ok,
        f"lingeo slope {lingeo['slope']:.3f} in [-1.4, -0.6]; locfre mises [{mises}] "
        f"strictly decreasing; elapsed {elapsed:.0f}s < 1200s",
    )


def test_criterion_9_cli_integration(tmp_path):
    runner = CliRunner()

    def config(name, **kwargs):
        path = tmp_path / name
        path.write_text(json.dumps(kwargs), encoding="utf-8")
        return str(path)

    sim_cfg = config("sim.json", curve="simple", n=20, sd=0.25, seed=1)
    data = tmp_path / "data.csv"
    r_sim = runner.invoke(cli, ["simulate", "--config", sim_cfg, "--out", str(data)])
    pred = tmp_path / "pred.csv"
    r_fit = runner.invoke(cli, ["fit", str(data), "--method", "locfre", "--h", "0.2",
                                "--out", str(pred)])
    fig1, fig2 = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_cfg = config("plot.json", curve="simple")
    r_p1 = runner.invoke(cli, ["plot", str(data), str(pred), "--config", plot_cfg,
                               "--out", str(fig1)])
    r_p2 = runner.invoke(cli, ["plot", str(data), str(pred), "--config", plot_cfg,
                               "--out", str(fig2)])
    pipeline_ok = (
        r_sim.exit_code == 0 and r_fit.exit_code == 0
        and r_p1.exit_code == 0 and r_p2.exit_code == 0
        and np.loadtxt(data, delimiter=",", skiprows=1).shape == (20, 4)
        and np.loadtxt(pred, delimiter=",", skiprows=1).shape == (101, 6)
        and fig1.read_bytes() == fig2.read_bytes()
    )

    bad_cfg = config("bad.json", curve="simple", n=20, sd=9.0, seed=1)
    r_usage = runner.invoke(cli, ["simulate", "--config", bad_cfg,
                                  "--out", str(tmp_path / "x.csv")])
    r_numeric = runner.invoke(cli, ["fit", str(data), "--method", "trifre", "--N", "25",
                                    "--out", str(tmp_path / "x.csv")])
    codes_ok = r_usage.exit_code == 2 and r_numeric.exit_code == 3

    mise_cfg = config(
        "mise.json",
        settings=[{"curve": "geodesic", "n": 12, "sd": 0.5}],
        methods=["linfre", "lincos"], reps=3, seed=77,
    )
    t1, t8 = tmp_path / "t1.csv", tmp_path / "t8.csv"
    r_t1 = runner.invoke(cli, ["mise", "--config", mise_cfg, "--threads", "1", "--out", str(t1)])
    r_t8 = runner.invoke(cli, ["mise", "--config", mise_cfg, "--threads", "8", "--out", str(t8)])
    threads_ok = (
        r_t1.exit_code == 0 and r_t8.exit_code == 0
        and t1.read_bytes() == t8.read_bytes()
        and r_t1.output == r_t8.output
    )

    ok = pipeline_ok and codes_ok and threads_ok
    record_acceptance(
        "criterion 9 (CLI integration)",
        ok,
        f"pipeline parseable+deterministic: {pipeline_ok}; exit codes 2/3: {codes_ok}; "
        f"1 vs 8 threads byte-identical: {threads_ok}",
    )
