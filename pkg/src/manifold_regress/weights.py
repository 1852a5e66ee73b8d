"""Kernels, local-polynomial weights, linear weights, and the trigonometric basis.

All weight vectors here are signed linear-smoother weights: the
estimators consume them as coefficients of squared distances, so no
nonnegativity is assumed anywhere.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import NearSingularDesignError, SingularDesignError

MIN_EIGEN_THRESHOLD = 1e-10

KERNELS = ("epanechnikov", "rectangular")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel shape plus bandwidth h (in covariate units)."""

    kind: str = "epanechnikov"
    h: float = 0.2

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; choose from {KERNELS}")
        if self.h <= 0:
            raise ValueError("bandwidth h must be positive")

    def with_h(self, h):
        return KernelSpec(self.kind, h)


@dataclass(frozen=True)
class LocalPolyConfig:
    """Local-polynomial order and kernel."""

    order: int = 1
    kernel: KernelSpec = KernelSpec()

    def __post_init__(self):
        if self.order not in (0, 1, 2, 3):
            raise ValueError("local polynomial order must be one of 0, 1, 2, 3")


@dataclass
class WeightVector:
    """Per-observation weights for one evaluation point.

    min_eigen is the smallest eigenvalue of the scaled design matrix
    B_{n,t}; callers use it to judge how trustworthy the solve was.
    """

    w: np.ndarray
    eval_point: float
    min_eigen: float


def kernel_eval(kind, u):
    """Evaluate a kernel shape at (an array of) scaled offsets."""
    u = np.asarray(u, dtype=float)
    if kind == "epanechnikov":
        return 0.75 * (1.0 - u * u) * (np.abs(u) <= 1.0)
    if kind == "rectangular":
        return 1.0 * (np.abs(u) <= 0.5)
    raise ValueError(f"unknown kernel kind {kind!r}; choose from {KERNELS}")


def trig_psi(k, x):
    """k-th trigonometric basis function: 1, then paired sqrt(2) cos/sin."""
    if k < 1:
        raise ValueError("basis index starts at 1")
    x = np.asarray(x, dtype=float)
    if k == 1:
        return np.ones_like(x)
    freq = 2.0 * np.pi * (k // 2)
    if k % 2 == 0:
        return np.sqrt(2.0) * np.cos(freq * x)
    return np.sqrt(2.0) * np.sin(freq * x)


def psi_vec(N, x):
    """Stack of the first N basis functions, shape x.shape + (N,)."""
    if N < 1:
        raise ValueError("need at least one basis function")
    x = np.asarray(x, dtype=float)
    return np.stack([trig_psi(k + 1, x) for k in range(N)], axis=-1)


def local_poly_weights(xs, t, order=1, kernel=KernelSpec()):
    """Local-polynomial weights of the given order at evaluation point t.

    Builds the scaled design matrix
    B = (1/nh) sum_i Psi(u_i) Psi(u_i)^T K(u_i) with u_i = (x_i - t)/h
    and Psi(u) = (u^j / j!)_{j=0..order}, then returns
    w_i = (1/nh) Psi(0)^T B^{-1} Psi(u_i) K(u_i), which sums to one and
    annihilates (x_i - t)^j for j = 1..order.  Raises
    NearSingularDesignError when the smallest eigenvalue of B falls
    below MIN_EIGEN_THRESHOLD; the caller decides the fallback.
    """
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    if n < order + 1:
        raise ValueError(f"need at least order + 1 = {order + 1} observations")
    h = kernel.h
    u = (xs - t) / h
    kv = kernel_eval(kernel.kind, u)
    powers = np.stack(
        [u**j / factorial(j) for j in range(order + 1)], axis=-1
    )
    design = (powers * kv[:, np.newaxis]).T @ powers / (n * h)
    min_eigen = float(np.linalg.eigvalsh(design)[0])
    if min_eigen < MIN_EIGEN_THRESHOLD:
        raise NearSingularDesignError(min_eigen)
    coef = np.linalg.solve(design, np.eye(order + 1)[0])
    w = (powers @ coef) * kv / (n * h)
    return WeightVector(w=w, eval_point=float(t), min_eigen=min_eigen)


def linfre_weights(xs, t):
    """Global linear-smoother weights w_i = (1, t) B^{-1} (1, x_i)^T.

    B = X X^T for the design X with rows (1, x_i).  The weights
    reproduce constants and the covariate: sum w_i = 1 and
    sum w_i x_i = t.  Raises SingularDesignError when all covariates
    coincide.
    """
    xs = np.asarray(xs, dtype=float)
    design = np.stack([np.ones_like(xs), xs], axis=0)
    gram = design @ design.T
    if abs(np.linalg.det(gram)) < 1e-12:
        raise SingularDesignError("design needs two distinct covariate values")
    return np.array([1.0, t]) @ np.linalg.solve(gram, design)


def trifre_weights(xs, t, N):
    """Trigonometric projection weights w_i = Psi_N(t)^T Psi_N(x_i) / n."""
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    if N >= n:
        raise ValueError(f"N >= n (N={N}, n={n})")
    return psi_vec(N, xs) @ psi_vec(N, float(t)) / n
