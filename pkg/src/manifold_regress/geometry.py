"""Geometry of the unit hypersphere S^k embedded in R^(k+1).

All functions accept numpy arrays whose last axis is the ambient
coordinate axis and broadcast over any leading axes.  Points are unit
vectors; tangent vectors at a point p are ambient vectors orthogonal
to p.  Distances and tangent-vector norms are in radians.
"""

import numpy as np

# Gap below pi under which two points are treated as antipodal; the
# logarithm map is undefined (direction arbitrary) past this gap.
ANTIPODAL_GAP = 1e-8

_UNIT_ATOL = 1e-12


class AntipodalPointsError(ValueError):
    """Logarithm map requested at (nearly) antipodal points."""


def as_point(q, atol=1e-9):
    """Validate and renormalize a point (or array of points) on S^k.

    Accepts anything within `atol` of unit norm and returns exactly
    normalized float arrays.  Raises ValueError for zero-length or
    badly non-unit input.
    """
    q = np.asarray(q, dtype=float)
    if q.shape[-1] < 2:
        raise ValueError("sphere points need an ambient dimension of at least 2")
    norms = np.linalg.norm(q, axis=-1)
    if np.any(norms <= 1e-30):
        raise ValueError("zero-length input cannot be normalized to the unit sphere")
    if not np.all(np.abs(norms - 1.0) <= atol):
        raise ValueError(f"input is not on the unit sphere (|norm - 1| > {atol})")
    return q / norms[..., np.newaxis]


def check_tangent(base, vec, atol=1e-10):
    """Check that vec is tangent to the sphere at base (base . vec = 0)."""
    base = np.asarray(base, dtype=float)
    vec = np.asarray(vec, dtype=float)
    if base.shape != vec.shape:
        raise ValueError("base point and tangent vector must have equal shapes")
    inner = np.abs(np.sum(base * vec, axis=-1))
    if np.any(inner > atol):
        raise ValueError(f"vector is not tangent at the base point (|<p,v>| = {inner.max():g})")
    return base, vec


def project_tangent(base, vec):
    """Project an ambient vector onto the tangent space at base."""
    base = np.asarray(base, dtype=float)
    vec = np.asarray(vec, dtype=float)
    inner = np.sum(base * vec, axis=-1, keepdims=True)
    return vec - inner * base


def dist(q, p):
    """Intrinsic distance arccos(q . p) in [0, pi], broadcasting."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape[-1] != p.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {q.shape[-1]} vs {p.shape[-1]}"
        )
    inner = np.sum(q * p, axis=-1)
    # Floating-point drift past +-1 would produce NaN in arccos.
    return np.arccos(np.clip(inner, -1.0, 1.0))


def exp_map(base, vec):
    """Exponential map cos(|v|) p + sin(|v|) v/|v|, exact at v = 0."""
    base = np.asarray(base, dtype=float)
    vec = np.asarray(vec, dtype=float)
    norm = np.linalg.norm(vec, axis=-1, keepdims=True)
    # Avoid 0/0 at |v| = 0: the sin(|v|) factor is 0 there, so any
    # finite stand-in direction gives exactly `base`.
    unit = np.where(norm > 0.0, vec / np.where(norm > 0.0, norm, 1.0), 0.0)
    return np.cos(norm) * base + np.sin(norm) * unit


def log_map(base, q):
    """Inverse of exp_map: tangent vector at base pointing to q.

    |log_map(base, q)| equals dist(base, q).  Raises
    AntipodalPointsError when dist(base, q) >= pi - ANTIPODAL_GAP,
    where the direction would be arbitrary.
    """
    base = np.asarray(base, dtype=float)
    q = np.asarray(q, dtype=float)
    d = dist(base, q)
    if np.any(d >= np.pi - ANTIPODAL_GAP):
        raise AntipodalPointsError(
            "logarithm map undefined at (nearly) antipodal points"
        )
    rej = q - np.sum(base * q, axis=-1, keepdims=True) * base
    norm = np.linalg.norm(rej, axis=-1, keepdims=True)
    unit = np.where(norm > 0.0, rej / np.where(norm > 0.0, norm, 1.0), 0.0)
    return d[..., np.newaxis] * unit


def from_angles(theta, phi):
    """Point on S^2 from colatitude theta in [0, pi] and longitude phi."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def to_angles(q):
    """Angles (theta, phi) of a point on S^2; phi = 0 at the poles.

    theta is in [0, pi], phi in [0, 2*pi).  Inverse of from_angles away
    from the poles.
    """
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 3:
        raise ValueError("angle coordinates are defined for S^2 only (dimension 3)")
    z = np.clip(q[..., 2], -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.arctan2(q[..., 1], q[..., 0]) % (2.0 * np.pi)
    # At the poles the longitude is arbitrary; pinning it keeps plots
    # and tests deterministic.
    phi = np.where(np.abs(z) >= 1.0, 0.0, phi)
    return theta, phi


def rotation_to(m):
    """Orthogonal matrix R with R e_{k+1} = m, via a Householder reflection.

    Deterministic; returns the identity when m = e_{k+1}.  R is its own
    inverse (a reflection swapping e_{k+1} and m).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 1:
        raise ValueError("rotation_to expects a single point")
    dim = m.shape[0]
    e = np.zeros(dim)
    e[-1] = 1.0
    u = m - e
    uu = u @ u
    if uu < 1e-30:
        return np.eye(dim)
    return np.eye(dim) - 2.0 / uu * np.outer(u, u)


def tangent_basis(p):
    """Orthonormal basis of the tangent space at p, rows of shape (k, k+1).

    Deterministic given p; at p = e_{k+1} the basis is {e_1, ..., e_k}.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError("tangent_basis expects a single point")
    # Columns of the reflection taking e_{k+1} to p are orthonormal and
    # the first k of them are orthogonal to p.
    return rotation_to(p)[:, :-1].T
