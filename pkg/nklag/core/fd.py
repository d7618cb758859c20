"""Finite-difference stencils on uniform grids."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def derivative(f, h: float, axis: int) -> np.ndarray:
    """First derivative along `axis`.

    Fourth-order central differences where two neighbours exist on both sides,
    second-order (one-sided at the edges) elsewhere. Works on trailing
    component axes, e.g. quaternion grids of shape (n_t, n_u, n_v, 4).
    """
    f = np.asarray(f, dtype=np.float64)
    n = f.shape[axis]
    if n < 3:
        raise DomainError(f"need at least 3 samples along axis {axis}, got {n}")

    out = np.gradient(f, h, axis=axis, edge_order=2)
    if n >= 5:
        f = np.moveaxis(f, axis, 0)
        inner = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
        np.moveaxis(out, axis, 0)[2:-2] = inner
    return out


def second_derivative(f, h: float, axis: int) -> np.ndarray:
    """Second derivative along `axis`, fourth order in the interior."""
    f = np.asarray(f, dtype=np.float64)
    n = f.shape[axis]
    g = np.moveaxis(f, axis, 0)
    out = np.full(g.shape, np.nan)
    out[1:-1] = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / h**2
    if n >= 5:
        out[2:-2] = (-g[4:] + 16.0 * g[3:-1] - 30.0 * g[2:-2] + 16.0 * g[1:-3] - g[:-4]) / (12.0 * h**2)
    return np.moveaxis(out, 0, axis)


def laplacian(values, hu: float, hv: float) -> np.ndarray:
    """5-point Laplacian; boundary sites are NaN."""
    values = np.asarray(values, dtype=np.float64)
    out = np.full(values.shape, np.nan)
    out[1:-1, 1:-1] = (
        (values[2:, 1:-1] - 2.0 * values[1:-1, 1:-1] + values[:-2, 1:-1]) / hu**2
        + (values[1:-1, 2:] - 2.0 * values[1:-1, 1:-1] + values[1:-1, :-2]) / hv**2
    )
    return out


def interior_sup(values) -> float:
    """Sup-norm over finite entries, the convention for residual fields."""
    values = np.asarray(values, dtype=np.float64)
    finite = values[np.isfinite(values)]
    return float(np.max(np.abs(finite))) if finite.size else 0.0
