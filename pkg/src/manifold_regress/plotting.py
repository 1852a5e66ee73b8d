"""Deterministic SVG figures of sphere curves in angle coordinates.

The sphere is unrolled to the rectangle (theta, phi) in [0, pi] x
[0, 2*pi): phi runs along the horizontal axis, theta along the
vertical with the theta = 0 pole at the top.  Curves become polylines,
split wherever phi wraps across the 0 / 2*pi seam; colors follow a
rainbow over the covariate.  The output is plain SVG text built with
fixed float formatting, so identical inputs give identical bytes.
"""

import colorsys

import numpy as np

from . import geometry

# Plot geometry: a 2:1 panel matches the 2*pi : pi angle ranges.
_PANEL_W = 640.0
_PANEL_H = 320.0
_MARGIN_L = 70.0
_MARGIN_R = 170.0
_MARGIN_T = 30.0
_MARGIN_B = 55.0

_BORDER_PALETTE = (
    "#0072b2",
    "#009e73",
    "#cc79a7",
    "#d55e00",
    "#56b4e9",
    "#e69f00",
)

_PHI_TICKS = ((0.0, "0"), (np.pi / 2, "π/2"), (np.pi, "π"), (3 * np.pi / 2, "3π/2"), (2 * np.pi, "2π"))
_THETA_TICKS = ((0.0, "0"), (np.pi / 4, "π/4"), (np.pi / 2, "π/2"), (3 * np.pi / 4, "3π/4"), (np.pi, "π"))


def rainbow_color(t):
    """Hex color for t in [0, 1]: red through blue to violet."""
    r, g, b = colorsys.hsv_to_rgb(0.8 * float(np.clip(t, 0.0, 1.0)), 0.85, 0.85)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def _fmt(value):
    return f"{value:.3f}"


def _xy(theta, phi):
    x = _MARGIN_L + _PANEL_W * phi / (2.0 * np.pi)
    y = _MARGIN_T + _PANEL_H * theta / np.pi
    return x, y


def split_wraps(theta, phi):
    """Split an angle path into runs with no jump across the phi seam.

    A step of more than pi in phi is read as a wrap through the
    0 / 2*pi seam, not as actual movement across the chart.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if len(phi) == 0:
        return []
    breaks = np.flatnonzero(np.abs(np.diff(phi)) > np.pi) + 1
    pieces = []
    for lo, hi in zip(np.r_[0, breaks], np.r_[breaks, len(phi)]):
        pieces.append((theta[lo:hi], phi[lo:hi]))
    return pieces


def _polyline(theta, phi, stroke, width, opacity=None, dashed=False):
    points = " ".join(
        f"{_fmt(x)},{_fmt(y)}" for x, y in (_xy(a, b) for a, b in zip(theta, phi))
    )
    extra = ""
    if opacity is not None:
        extra += f' stroke-opacity="{_fmt(opacity)}"'
    if dashed:
        extra += ' stroke-dasharray="3,3"'
    return (
        f'<polyline points="{points}" fill="none" stroke="{stroke}" '
        f'stroke-width="{_fmt(width)}" stroke-linecap="round" '
        f'stroke-linejoin="round"{extra}/>'
    )


def _curve_layers(ts, points, border, border_width, core_width):
    """A bordered rainbow curve: one underlay polyline per seam-free
    run, then short rainbow segments colored by the covariate."""
    theta, phi = geometry.to_angles(np.asarray(points, dtype=float))
    out = []
    offset = 0
    for th, ph in split_wraps(theta, phi):
        if len(th) >= 2:
            out.append(_polyline(th, ph, border, border_width))
        run_ts = ts[offset : offset + len(th)]
        for i in range(len(th) - 1):
            mid = 0.5 * (run_ts[i] + run_ts[i + 1])
            out.append(
                _polyline(th[i : i + 2], ph[i : i + 2], rainbow_color(mid), core_width)
            )
        offset += len(th)
    return out


def _gridline_layers():
    """Twelve great circles: the equator tilted about the x-axis."""
    s = np.linspace(0.0, 2.0 * np.pi, 361)
    ring = np.stack([np.cos(s), np.sin(s), np.zeros_like(s)], axis=-1)
    out = []
    for k in range(12):
        ang = k * np.pi / 12.0
        rot = np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, np.cos(ang), -np.sin(ang)],
                [0.0, np.sin(ang), np.cos(ang)],
            ]
        )
        theta, phi = geometry.to_angles(ring @ rot.T)
        for th, ph in split_wraps(theta, phi):
            if len(th) >= 2:
                out.append(_polyline(th, ph, "#d0d0d0", 0.6))
    return out


def _axes_layers():
    x0, y0 = _xy(np.pi, 0.0)
    x1, y1 = _xy(0.0, 2.0 * np.pi)
    out = [
        f'<rect x="{_fmt(_MARGIN_L)}" y="{_fmt(_MARGIN_T)}" width="{_fmt(_PANEL_W)}" '
        f'height="{_fmt(_PANEL_H)}" fill="none" stroke="#222222" stroke-width="1.000"/>'
    ]
    for phi, label in _PHI_TICKS:
        x, _ = _xy(0.0, phi)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" y2="{_fmt(y0 + 5)}" '
            'stroke="#222222" stroke-width="1.000"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y0 + 20)}" font-size="13" '
            f'text-anchor="middle" fill="#222222">{label}</text>'
        )
    for theta, label in _THETA_TICKS:
        _, y = _xy(theta, 0.0)
        out.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x0 - 5)}" y2="{_fmt(y)}" '
            'stroke="#222222" stroke-width="1.000"/>'
        )
        out.append(
            f'<text x="{_fmt(x0 - 9)}" y="{_fmt(y + 4)}" font-size="13" '
            f'text-anchor="end" fill="#222222">{label}</text>'
        )
    out.append(
        f'<text x="{_fmt(_MARGIN_L + _PANEL_W / 2)}" y="{_fmt(y0 + 42)}" font-size="14" '
        'text-anchor="middle" fill="#222222">φ</text>'
    )
    out.append(
        f'<text x="{_fmt(x0 - 45)}" y="{_fmt(_MARGIN_T + _PANEL_H / 2)}" font-size="14" '
        'text-anchor="middle" fill="#222222">θ</text>'
    )
    return out


def _legend_layers(entries):
    x = _MARGIN_L + _PANEL_W + 18.0
    out = []
    for i, (label, color) in enumerate(entries):
        y = _MARGIN_T + 12.0 + 20.0 * i
        out.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(y - 4)}" x2="{_fmt(x + 22)}" y2="{_fmt(y - 4)}" '
            f'stroke="{color}" stroke-width="4.000"/>'
        )
        out.append(
            f'<text x="{_fmt(x + 28)}" y="{_fmt(y)}" font-size="13" '
            f'fill="#222222">{label}</text>'
        )
    return out


def render_svg(
    truth=None,
    predictions=(),
    observations=None,
    truth_at_observations=None,
    gridlines=False,
):
    """Compose the figure; every argument is optional.

    truth: (ts, points) pair drawn with a black border.
    predictions: sequence of (label, ts, points) drawn with colored
        borders from a fixed palette.
    observations: (xs, ys) dataset scatter, rainbow-colored by x.
    truth_at_observations: points m(x_i) matching observations; drawn
        as thin gray residual segments from each y_i.
    """
    width = _MARGIN_L + _PANEL_W + _MARGIN_R
    height = _MARGIN_T + _PANEL_H + _MARGIN_B
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>',
    ]
    if gridlines:
        parts.extend(_gridline_layers())
    parts.extend(_axes_layers())

    legend = []
    if observations is not None and truth_at_observations is not None:
        xs, ys = observations
        th_y, ph_y = geometry.to_angles(np.asarray(ys, dtype=float))
        th_m, ph_m = geometry.to_angles(np.asarray(truth_at_observations, dtype=float))
        for i in range(len(th_y)):
            if abs(ph_y[i] - ph_m[i]) > np.pi:
                continue
            parts.append(
                _polyline(
                    np.array([th_y[i], th_m[i]]),
                    np.array([ph_y[i], ph_m[i]]),
                    "#999999",
                    0.7,
                )
            )
    if truth is not None:
        ts, points = truth
        parts.extend(_curve_layers(np.asarray(ts, dtype=float), points, "#000000", 5.0, 2.4))
        legend.append(("truth", "#000000"))
    for i, (label, ts, points) in enumerate(predictions):
        color = _BORDER_PALETTE[i % len(_BORDER_PALETTE)]
        parts.extend(_curve_layers(np.asarray(ts, dtype=float), points, color, 5.0, 2.4))
        legend.append((label, color))
    if observations is not None:
        xs, ys = observations
        xs = np.asarray(xs, dtype=float)
        theta, phi = geometry.to_angles(np.asarray(ys, dtype=float))
        lo, hi = float(xs.min()), float(xs.max())
        span = hi - lo if hi > lo else 1.0
        for i in range(len(xs)):
            x, y = _xy(theta[i], phi[i])
            color = rainbow_color((xs[i] - lo) / span)
            parts.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.200" fill="{color}" '
                'stroke="#222222" stroke-width="0.600"/>'
            )
        legend.append(("observations", "#888888"))
    parts.extend(_legend_layers(legend))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
