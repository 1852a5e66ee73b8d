"""Contracted-uniform noise, true-curve models, and dataset generation.

All sampling functions take an explicit numpy Generator; reproducibility
contracts are stated in terms of that generator's stream.  Monte-Carlo
callers derive one independent stream per replication from
(master seed, replication index).
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .spaces import Euclidean, Sphere

# Largest standard deviation the contracted uniform family can reach,
# at full contraction parameter a = 1.
SD_MAX = float(np.sqrt((np.pi**2 - 4.0) / 2.0))


class Geodesic:
    """Constant-speed great-circle curve t -> Exp(start, t * velocity)."""

    periodic = False

    def __init__(self, start, velocity):
        self.start = geometry.as_point(start)
        velocity = np.asarray(velocity, dtype=float)
        geometry.check_tangent(self.start, velocity)
        self.velocity = velocity

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return geometry.exp_map(self.start, t[..., np.newaxis] * self.velocity)

    def __repr__(self):
        return f"Geodesic(speed={np.linalg.norm(self.velocity):g})"


class Simple:
    """Closed circle at colatitude pi/4, one revolution per unit of t."""

    periodic = True

    def point(self, t):
        t = np.asarray(t, dtype=float)
        theta = np.full_like(t, np.pi / 4.0)
        phi = (0.5 + 2.0 * np.pi * t) % (2.0 * np.pi)
        return geometry.from_angles(theta, phi)

    def __repr__(self):
        return "Simple()"


class Spiral:
    """Open spiral sweeping colatitude and 1.5 revolutions of longitude."""

    periodic = False

    def point(self, t):
        t = np.asarray(t, dtype=float)
        theta = np.pi / 8.0 + 0.75 * np.pi * t
        phi = (0.5 + 3.0 * np.pi * t) % (2.0 * np.pi)
        return geometry.from_angles(theta, phi)

    def __repr__(self):
        return "Spiral()"


def curve_point(model, t):
    """Evaluate a curve model at (an array of) covariate values."""
    return model.point(t)


def sd_to_contraction(sd):
    """Contraction parameter a giving noise standard deviation sd."""
    if not 0.0 <= sd <= SD_MAX:
        raise ValueError(f"sd must lie in [0, {SD_MAX:.5f}], got {sd:g}")
    return sd / SD_MAX


def contraction_to_sd(a):
    """Noise standard deviation of the contracted uniform family at a."""
    return a * SD_MAX


def sample_cntr_unif(center, a, rng, size=None):
    """Draw from the contracted uniform distribution around center.

    The colatitude angle Theta has density sin(x)/2 on [0, pi] (drawn
    as arccos(1 - 2U)), the longitude Phi is uniform; the contracted
    point Z_a is rotated so its pole lands on center.  center may be a
    single point (with optional size for repeated draws) or a batch of
    centers, one draw each.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"contraction parameter a must lie in [0, 1], got {a:g}")
    center = np.asarray(center, dtype=float)
    if center.shape[-1] != 3:
        raise ValueError("contracted uniform sampling is defined on S^2")
    single = center.ndim == 1 and size is None
    m = size if size is not None else (1 if center.ndim == 1 else len(center))
    theta = np.arccos(1.0 - 2.0 * rng.random(m))
    phi = 2.0 * np.pi * rng.random(m)
    sa = np.sin(a * theta)
    z = np.stack([sa * np.cos(phi), sa * np.sin(phi), np.cos(a * theta)], axis=-1)
    # Householder reflection taking e3 to each center, applied rowwise.
    u = np.broadcast_to(center, z.shape) - np.array([0.0, 0.0, 1.0])
    uu = np.sum(u * u, axis=-1, keepdims=True)
    reflected = z - 2.0 * u * (np.sum(u * z, axis=-1, keepdims=True) / np.where(uu > 1e-30, uu, 1.0))
    y = np.where(uu > 1e-30, reflected, z)
    return y[0] if single else y


def random_geodesic(speed, rng):
    """Random geodesic: uniform start, uniform tangent direction, fixed speed.

    The source paper does not specify this distribution; normalized
    Gaussians for the start and for the projected direction are this
    package's choice.
    """
    if speed < 0:
        raise ValueError("speed must be nonnegative")
    while True:
        start = rng.standard_normal(3)
        norm = np.linalg.norm(start)
        if norm > 1e-12:
            start = start / norm
            break
    while True:
        g = rng.standard_normal(3)
        direction = g - (g @ start) * start
        norm = np.linalg.norm(direction)
        if norm > 1e-9:
            direction = direction / norm
            break
    return Geodesic(start, speed * direction)


@dataclass
class Dataset:
    """Covariates on a real interval plus responses in a metric space."""

    xs: np.ndarray
    ys: np.ndarray
    space: object = field(default_factory=lambda: Sphere(2))
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = self.space.check_points(np.asarray(self.ys, dtype=float))
        lo, hi = self.domain
        if self.xs.ndim != 1 or len(self.xs) != len(self.ys):
            raise ValueError("xs and ys must be equal-length 1-D/2-D arrays")
        if len(self.xs) < 2:
            raise ValueError("a dataset needs at least 2 observations")
        if np.any(np.diff(self.xs) < 0):
            raise ValueError("covariates must be sorted ascending")
        if self.xs[0] < lo - 1e-12 or self.xs[-1] > hi + 1e-12:
            raise ValueError(f"covariates must lie inside the domain [{lo:g}, {hi:g}]")

    @property
    def n(self):
        return len(self.xs)


def equispaced(n, domain=(0.0, 1.0)):
    """The fixed design lo + (i - 1)(hi - lo)/(n - 1), i = 1..n."""
    lo, hi = domain
    return lo + np.arange(n) * ((hi - lo) / (n - 1))


def generate_dataset(model, n, a, domain=(0.0, 1.0), rng=None):
    """Equispaced design with contracted uniform noise around the curve."""
    if n < 2:
        raise ValueError("need n >= 2")
    if rng is None:
        rng = np.random.default_rng()
    xs = equispaced(n, domain)
    centers = curve_point(model, xs)
    ys = sample_cntr_unif(centers, a, rng)
    return Dataset(xs=xs, ys=ys, space=Sphere(2), domain=tuple(domain))


def write_dataset_csv(dataset, path):
    """Write a dataset as CSV with columns x, y1..y{dim}, 17 significant digits."""
    dim = dataset.ys.shape[1]
    header = "x," + ",".join(f"y{j + 1}" for j in range(dim))
    lines = [header]
    for x, y in zip(dataset.xs, dataset.ys):
        lines.append(",".join(f"{v:.17g}" for v in (x, *y)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset_csv(path):
    """Read a dataset written by write_dataset_csv.

    Rows of unit norm are interpreted as sphere points, anything else
    as Euclidean coordinates.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[0] != "x" or len(header) < 2:
            raise ValueError(f"unrecognized dataset header: {header}")
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    if body.shape[1] != len(header):
        raise ValueError("dataset rows do not match the header")
    xs, ys = body[:, 0], body[:, 1:]
    norms = np.linalg.norm(ys, axis=1)
    if np.all(np.abs(norms - 1.0) <= 1e-9):
        space = Sphere(ys.shape[1] - 1)
    else:
        space = Euclidean(ys.shape[1])
    return Dataset(xs=xs, ys=ys, space=space, domain=(float(xs[0]), float(xs[-1])))
