"""Command-line front end: simulate, fit, mise, rate, plot.

Configs are flat JSON files with explicit keys; command-line flags
override config values.  Every data-producing command writes a JSON
manifest next to its output with keys version, seed, config,
started_at, elapsed_s.  Exit codes: 0 success, 2 malformed
configuration or usage (the message names the offending key), 3
numeric failure inside an estimator.
"""

import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__, geometry
from .estimators import METHODS, make_estimator
from .evaluation import (
    LOOCV_GRIDS,
    LOOCV_OPTIONS,
    ExperimentConfig,
    RateCheckConfig,
    ise,
    loocv_select,
    rate_check,
    resolve_curve,
    run_mise,
)
from .exceptions import ConfigError, EstimatorError
from .sampling import (
    curve_point,
    generate_dataset,
    read_dataset_csv,
    sd_to_contraction,
    write_dataset_csv,
)
from .spaces import Sphere

_GRID_SIZE = 101

_method_option = click.option(
    "--method",
    type=click.Choice(sorted(METHODS)),
    required=True,
    help="Estimator to fit.",
)


class _Failure(Exception):
    def __init__(self, code, message):
        self.code = code
        self.message = message
        super().__init__(message)


def _fail(code, message):
    raise _Failure(code, message)


def _run_guarded(parse_and_run):
    """Map exception classes onto the exit-code contract."""
    try:
        parse_and_run()
    except _Failure as err:
        click.echo(f"error: {err.message}", err=True)
        sys.exit(err.code)
    except ConfigError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)
    except (EstimatorError, np.linalg.LinAlgError, ValueError) as err:
        click.echo(f"error: {type(err).__name__}: {err}", err=True)
        sys.exit(3)


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as err:
        raise ConfigError(f"config: cannot read {path} ({err})") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config: invalid JSON in {path} ({err})") from err
    if not isinstance(config, dict):
        raise ConfigError("config: top level must be a JSON object")
    return config


def _take(config, key, kinds, kind_name, required=True, default=None):
    if key not in config:
        if required:
            raise ConfigError(f"{key}: missing required config key")
        return default
    value = config[key]
    if isinstance(value, bool) and bool not in (
        kinds if isinstance(kinds, tuple) else (kinds,)
    ):
        raise ConfigError(f"{key}: expected {kind_name}, got a boolean")
    if not isinstance(value, kinds):
        raise ConfigError(f"{key}: expected {kind_name}, got {type(value).__name__}")
    return value


def _resolve_seed(flag_value, config, required=True):
    if flag_value is not None:
        return int(flag_value)
    seed = _take(config, "seed", (int,), "an integer", required=required, default=0)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed: must fit in an unsigned 64-bit integer")
    return seed


def _resolve_threads(flag_value, config):
    if flag_value is not None:
        return flag_value
    env = os.environ.get("MANIFOLD_REGRESS_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError as err:
            raise ConfigError("MANIFOLD_REGRESS_THREADS: must be an integer") from err
        if value < 1:
            raise ConfigError("MANIFOLD_REGRESS_THREADS: must be positive")
        return value
    return _take(config, "threads", (int,), "an integer", required=False, default=1)


def _write_manifest(out_path, seed, config, started_at, t0):
    manifest = {
        "version": __version__,
        "seed": seed,
        "config": config,
        "started_at": started_at,
        "elapsed_s": time.monotonic() - t0,
    }
    path = Path(str(out_path) + ".manifest.json")
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _now_iso():
    return datetime.now(timezone.utc).isoformat()


def _write_text(path, text):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


@click.group()
@click.version_option(version=__version__, prog_name="manifold-regress")
def cli():
    """Regression estimators for sphere-valued responses."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
def simulate(config_path, seed, out_path):
    """Draw a dataset from a configured curve and noise level."""

    def run():
        t0 = time.monotonic()
        started = _now_iso()
        config = _load_config(config_path)
        seed_value = _resolve_seed(seed, config)
        curve = _take(config, "curve", (str,), "a string")
        n = _take(config, "n", (int,), "an integer")
        sd = _take(config, "sd", (int, float), "a number")
        speed = _take(config, "speed", (int, float), "a number", required=False, default=1.0)
        if n < 2:
            raise ConfigError("n: need a sample size of at least 2")
        try:
            a = sd_to_contraction(float(sd))
        except ValueError as err:
            raise ConfigError(f"sd: {err}") from err
        rng = np.random.default_rng(seed_value)
        model = resolve_curve(curve, float(speed), rng)
        data = generate_dataset(model, n, a, (0.0, 1.0), rng)
        write_dataset_csv(data, out_path)
        echo_config = dict(config, seed=seed_value, out=str(out_path))
        _write_manifest(out_path, seed_value, echo_config, started, t0)
        click.echo(f"wrote {n} observations to {out_path}")

    _run_guarded(run)


def _fit_with_flags(method, data, h, n_basis, use_loocv):
    hyper = {}
    if h is not None:
        hyper["h"] = h
    if n_basis is not None:
        hyper["N"] = n_basis
    if use_loocv:
        if method not in LOOCV_GRIDS:
            raise ConfigError(
                f"loocv: method {method!r} has no cross-validated hyperparameter"
            )
        name, grid = LOOCV_GRIDS[method]
        best, _, _ = loocv_select(
            data.xs,
            data.ys,
            data.space,
            lambda c: make_estimator(
                method, dict(hyper, **{name: c}), space=data.space,
                options=LOOCV_OPTIONS[method],
            ),
            grid,
        )
        hyper[name] = best
    est = make_estimator(method, hyper, space=data.space)
    est.fit(data.xs, data.ys)
    return est, est.fitted_hyper()


@cli.command()
@click.argument("dataset", type=click.Path())
@_method_option
@click.option("--h", type=float, default=None, help="Bandwidth for local methods.")
@click.option("--N", "n_basis", type=int, default=None, help="Basis size for series methods.")
@click.option("--loocv", is_flag=True, help="Select the hyperparameter by leave-one-out.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
def fit(dataset, method, h, n_basis, loocv, seed, out_path):
    """Fit an estimator to a dataset and write its curve on a 101-point grid."""

    def run():
        t0 = time.monotonic()
        started = _now_iso()
        try:
            data = read_dataset_csv(dataset)
        except (OSError, ValueError) as err:
            raise ConfigError(f"dataset: cannot parse {dataset} ({err})") from err
        if not isinstance(data.space, Sphere) or data.space.k != 2:
            raise ConfigError("dataset: responses must lie on the unit 2-sphere")
        est, hyper = _fit_with_flags(method, data, h, n_basis, loocv)
        ts = np.linspace(data.domain[0], data.domain[1], _GRID_SIZE)
        points = est.predict(ts)
        theta, phi = geometry.to_angles(points)
        rows = ["t,theta,phi,y1,y2,y3"]
        for i in range(len(ts)):
            rows.append(
                ",".join(
                    f"{v:.17g}"
                    for v in (ts[i], theta[i], phi[i], *points[i])
                )
            )
        _write_text(out_path, "\n".join(rows) + "\n")
        seed_value = 0 if seed is None else int(seed)
        echo_config = {
            "dataset": str(dataset),
            "method": method,
            "hyper": hyper,
            "loocv": bool(loocv),
            "out": str(out_path),
        }
        _write_manifest(out_path, seed_value, echo_config, started, t0)
        click.echo(f"wrote predictions for {method} to {out_path}")

    _run_guarded(run)


def _setting_label(setting):
    parts = [f"curve={setting['curve']}", f"n={setting['n']}", f"sd={setting['sd']:g}"]
    if setting["curve"] == "geodesic":
        parts.append(f"speed={setting['speed']:g}")
    return " ".join(parts)


def _text_table(labels, methods, cells):
    """Aligned text: one row per setting, one column per method."""
    header = ["Setting"] + list(methods)
    body = []
    for label in labels:
        row = [label]
        for method in methods:
            mise, se = cells[(label, method)]
            row.append(f"{mise:.5f} ({se:.5f})")
        body.append(row)
    widths = [
        max(len(row[j]) for row in [header] + body) for j in range(len(header))
    ]
    lines = []
    for row in [header] + body:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _parse_settings(config):
    raw = _take(config, "settings", (list,), "a list")
    if not raw:
        raise ConfigError("settings: need at least one setting")
    settings = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"settings: entry {i} must be an object")
        curve = _take(entry, "curve", (str,), "a string")
        n = _take(entry, "n", (int,), "an integer")
        sd = _take(entry, "sd", (int, float), "a number")
        speed = _take(entry, "speed", (int, float), "a number", required=False, default=1.0)
        settings.append({"curve": curve, "n": n, "sd": float(sd), "speed": float(speed)})
    return settings


@cli.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--reps", type=click.IntRange(min=1), default=None)
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
def mise(config_path, seed, reps, threads, out_path):
    """Monte-Carlo MISE table over settings x methods."""

    def run():
        t0 = time.monotonic()
        started = _now_iso()
        config = _load_config(config_path)
        seed_value = _resolve_seed(seed, config)
        thread_count = _resolve_threads(threads, config)
        rep_count = reps if reps is not None else _take(config, "reps", (int,), "an integer")
        methods = _take(config, "methods", (list,), "a list")
        if not methods:
            raise ConfigError("methods: need at least one method")
        for m in methods:
            if m not in METHODS:
                raise ConfigError(f"methods: unknown method {m!r}")
        settings = _parse_settings(config)
        hyper = {}
        if "h" in config:
            hyper["h"] = float(_take(config, "h", (int, float), "a number"))
        if "N" in config:
            hyper["N"] = _take(config, "N", (int,), "an integer")
        use_loocv = _take(config, "loocv", (bool,), "a boolean", required=False, default=False)
        reflect = _take(config, "reflect", (str,), "a string", required=False, default="auto")
        grid_size = _take(config, "grid_size", (int,), "an integer", required=False, default=_GRID_SIZE)

        labels = []
        cells = {}
        csv_rows = ["setting,method,mise,se,reps,warn"]
        warned = rep_count == 1
        for setting in settings:
            label = _setting_label(setting)
            labels.append(label)
            for method in methods:
                cell = ExperimentConfig(
                    method=method,
                    curve=setting["curve"],
                    n=setting["n"],
                    sd=setting["sd"],
                    reps=rep_count,
                    seed=seed_value,
                    speed=setting["speed"],
                    hyper=dict(hyper),
                    loocv=use_loocv and method in LOOCV_GRIDS,
                    reflect=reflect,
                    grid_size=grid_size,
                    threads=thread_count,
                )
                result = run_mise(cell)
                cells[(label, method)] = (result["mise"], result["se"])
                warn = "se_undefined" if rep_count == 1 else ""
                csv_rows.append(
                    f"{label},{method},{result['mise']:.17g},{result['se']:.17g},"
                    f"{rep_count},{warn}"
                )
        _write_text(out_path, "\n".join(csv_rows) + "\n")
        echo_config = dict(
            config, seed=seed_value, reps=rep_count, threads=thread_count, out=str(out_path)
        )
        _write_manifest(out_path, seed_value, echo_config, started, t0)
        click.echo(_text_table(labels, methods, cells))
        if warned:
            click.echo("warning: reps=1, standard errors undefined and reported as 0")

    _run_guarded(run)


@cli.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--reps", type=click.IntRange(min=1), default=None)
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
def rate(config_path, seed, reps, threads, out_path):
    """MISE along a sample-size ladder and its log-log slope."""

    def run():
        t0 = time.monotonic()
        started = _now_iso()
        config = _load_config(config_path)
        seed_value = _resolve_seed(seed, config)
        thread_count = _resolve_threads(threads, config)
        rep_count = reps if reps is not None else _take(config, "reps", (int,), "an integer")
        method = _take(config, "method", (str,), "a string")
        curve = _take(config, "curve", (str,), "a string")
        sd = float(_take(config, "sd", (int, float), "a number"))
        ladder = _take(config, "ladder", (list,), "a list")
        speed = float(_take(config, "speed", (int, float), "a number", required=False, default=1.0))
        hyper = {}
        if "h" in config:
            hyper["h"] = float(_take(config, "h", (int, float), "a number"))
        if "N" in config:
            hyper["N"] = _take(config, "N", (int,), "an integer")
        use_loocv = _take(config, "loocv", (bool,), "a boolean", required=False, default=False)
        if not all(isinstance(n, int) for n in ladder):
            raise ConfigError("ladder: entries must be integers")
        rc = RateCheckConfig(
            method=method,
            curve=curve,
            sd=sd,
            ladder=tuple(ladder),
            reps=rep_count,
            seed=seed_value,
            speed=speed,
            hyper=hyper,
            loocv=use_loocv,
            threads=thread_count,
        )
        result = rate_check(rc)
        rows = ["n,mise,slope,degenerate"]
        for n, m in zip(result["ns"], result["mises"]):
            rows.append(
                f"{n},{m:.17g},{result['slope']:.17g},{str(result['degenerate']).lower()}"
            )
        _write_text(out_path, "\n".join(rows) + "\n")
        echo_config = dict(
            config, seed=seed_value, reps=rep_count, threads=thread_count, out=str(out_path)
        )
        _write_manifest(out_path, seed_value, echo_config, started, t0)
        flag = " (degenerate: optimizer noise floor)" if result["degenerate"] else ""
        click.echo(f"slope = {result['slope']:.4f}{flag}")

    _run_guarded(run)


def _classify_plot_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
    except OSError as err:
        raise ConfigError(f"files: cannot read {path} ({err})") from err
    if header.startswith("x,"):
        return "dataset"
    if header.startswith("t,theta,phi"):
        return "predictions"
    raise ConfigError(f"files: unrecognized header in {path}")


def _read_predictions_csv(path):
    body = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if body.shape[1] != 6:
        raise ConfigError(f"files: expected 6 columns in {path}")
    return body[:, 0], body[:, 3:6]


@cli.command()
@click.argument("files", nargs=-1, type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Curve config supplying the ground truth.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--gridlines", is_flag=True, help="Add 12 great-circle traces.")
def plot(files, config_path, out_path, gridlines):
    """Angle-coordinate SVG of datasets, fitted curves, and the truth."""

    def run():
        from .plotting import render_svg

        observations = None
        predictions = []
        for path in files:
            kind = _classify_plot_file(path)
            if kind == "dataset":
                if observations is not None:
                    raise ConfigError("files: more than one dataset file given")
                try:
                    data = read_dataset_csv(path)
                except (OSError, ValueError) as err:
                    raise ConfigError(f"files: cannot parse {path} ({err})") from err
                if not isinstance(data.space, Sphere) or data.space.k != 2:
                    raise ConfigError("files: dataset responses must lie on the unit 2-sphere")
                observations = (data.xs, data.ys)
            else:
                ts, points = _read_predictions_csv(path)
                predictions.append((Path(path).stem, ts, points))
        truth = None
        truth_at_obs = None
        if config_path is not None:
            config = _load_config(config_path)
            curve = _take(config, "curve", (str,), "a string")
            speed = float(_take(config, "speed", (int, float), "a number", required=False, default=1.0))
            seed_value = _resolve_seed(None, config, required=False)
            rng = np.random.default_rng(seed_value)
            model = resolve_curve(curve, speed, rng)
            ts = np.linspace(0.0, 1.0, _GRID_SIZE)
            truth = (ts, curve_point(model, ts))
            if observations is not None:
                truth_at_obs = curve_point(model, observations[0])
        if truth is None and observations is None and not predictions:
            raise ConfigError("files: nothing to plot (no files and no --config)")
        svg = render_svg(
            truth=truth,
            predictions=predictions,
            observations=observations,
            truth_at_observations=truth_at_obs,
            gridlines=gridlines,
        )
        _write_text(out_path, svg)
        click.echo(f"wrote figure to {out_path}")

    _run_guarded(run)


def main():
    cli(prog_name="manifold-regress")


if __name__ == "__main__":
    main()
