"""Lagrangian immersions whose first factor is a totally geodesic sphere.

The construction lives on S³ itself with the left-invariant frame
X₁(x) = xi, X₂(x) = xj, X₃(x) = xk, sampled through the chart
x(t, u, v) = e^{iu}e^{jv}e^{it}. In that chart

    ∂t = X₁
    ∂u = cos 2v·X₁ + sin 2t sin 2v·X₂ + cos 2t sin 2v·X₃
    ∂v = cos 2t·X₂ − sin 2t·X₃

and a t-independent β solves X₂X₂β + X₃X₃β = 2(3e^{−4β} − 1) exactly when it
solves the beta_s3 equation on the (u, v) grid.
"""

from __future__ import annotations

import logging

import numpy as np

from ..core.errors import DomainError
from ..core.quat import I, J, K, ONE, as_quat, conjugate_by, qnorm
from ..core.types import ConnectionForms, Grid3D, LambdaField, ScalarField2D
from .base import CaseBuilder

logger = logging.getLogger("nklag")

SINGULAR_MARGIN = 1e-6


def chart(t, u, v) -> np.ndarray:
    """x = e^{iu}e^{jv}e^{it} = (cos v cos(t+u), cos v sin(t+u), sin v cos(u−t), sin v sin(u−t))."""
    t, u, v = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (t, u, v)))
    return np.stack(
        [np.cos(v) * np.cos(t + u), np.cos(v) * np.sin(t + u), np.sin(v) * np.cos(u - t), np.sin(v) * np.sin(u - t)],
        axis=-1,
    )


def chart_tangents(t, u, v) -> np.ndarray:
    """(∂t x, ∂u x, ∂v x) stacked along axis −2."""
    t, u, v = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (t, u, v)))
    cv, sv = np.cos(v), np.sin(v)
    cp, sp = np.cos(t + u), np.sin(t + u)
    cm, sm = np.cos(u - t), np.sin(u - t)
    return np.stack(
        [
            np.stack([-cv * sp, cv * cp, sv * sm, -sv * cm], axis=-1),
            np.stack([-cv * sp, cv * cp, -sv * sm, sv * cm], axis=-1),
            np.stack([-sv * cp, -sv * sp, cv * cm, cv * sm], axis=-1),
        ],
        axis=-2,
    )


def chart_to_frame(t, v) -> np.ndarray:
    """Rows ∂t, ∂u, ∂v written in (X₁, X₂, X₃)."""
    t, v = np.broadcast_arrays(np.asarray(t, dtype=np.float64), np.asarray(v, dtype=np.float64))
    c2t, s2t, c2v, s2v = np.cos(2 * t), np.sin(2 * t), np.cos(2 * v), np.sin(2 * v)
    out = np.zeros(t.shape + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, :] = np.stack([c2v, s2t * s2v, c2t * s2v], axis=-1)
    out[..., 2, 1] = c2t
    out[..., 2, 2] = -s2t
    return out


def frame_to_chart(t, v) -> np.ndarray:
    """Rows X₁, X₂, X₃ written in (∂t, ∂u, ∂v); singular where sin 2v = 0."""
    t, v = np.broadcast_arrays(np.asarray(t, dtype=np.float64), np.asarray(v, dtype=np.float64))
    c2t, s2t, s2v = np.cos(2 * t), np.sin(2 * t), np.sin(2 * v)
    if np.any(np.abs(s2v) < SINGULAR_MARGIN):
        raise DomainError("the chart is singular where sin(2v) = 0")
    cot = np.cos(2 * v) / s2v
    out = np.zeros(t.shape + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, :] = np.stack([-s2t * cot, s2t / s2v, c2t], axis=-1)
    out[..., 2, :] = np.stack([-c2t * cot, c2t / s2v, -s2t], axis=-1)
    return out


def lambda_case2(beta) -> np.ndarray:
    """Λ = arctan(e^{2β})."""
    return np.arctan(np.exp(2.0 * np.asarray(beta, dtype=np.float64)))


def _rotated(h: np.ndarray, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """h·x·a·x⁻¹·h⁻¹."""
    return conjugate_by(h, conjugate_by(x, a))


def closed_form_q(grid: Grid3D, h=ONE) -> np.ndarray:
    """q = h·x·j·x⁻¹·h⁻¹, the solution for β ≡ ¼ ln 3."""
    x = chart(*grid.mesh())
    return _rotated(as_quat(h), x, J)


def forms_case2(beta: ScalarField2D, grid: Grid3D, h=ONE) -> tuple[ConnectionForms, LambdaField]:
    """Right-logarithmic derivatives of q along ∂t, ∂u, ∂v, built from the X-frame forms."""
    h = as_quat(h)
    if abs(float(qnorm(h)) - 1.0) > 1e-12:
        raise DomainError(f"h must be a unit quaternion, got norm {float(qnorm(h))!r}")
    CaseBuilder.check_fields(grid, beta)
    v_axis = grid.v.values
    if np.min(np.abs(np.sin(2.0 * v_axis))) < SINGULAR_MARGIN:
        raise DomainError(f"the chart is singular where sin(2v) = 0; v spans [{grid.v.start:g}, {grid.v.stop:g}]")

    tt, _, vv = grid.mesh()
    x = chart(*grid.mesh())
    p_i, p_j, p_k = (_rotated(h, x, unit)[..., 1:] for unit in (I, J, K))

    b = beta.values[None]
    b_u, b_v = (d[None] for d in beta.derivatives())
    c2t, s2t, c2v, s2v = np.cos(2 * tt), np.sin(2 * tt), np.cos(2 * vv), np.sin(2 * vv)
    x2_beta = (s2t / s2v) * b_u + c2t * b_v
    x3_beta = (c2t / s2v) * b_u - s2t * b_v
    damping = np.sqrt(3.0) * np.exp(-2.0 * b)

    along1 = -2.0 * p_i
    along2 = -x3_beta[..., None] * p_i - (1.0 - damping)[..., None] * p_j
    along3 = x2_beta[..., None] * p_i - (1.0 + damping)[..., None] * p_k

    beta_t = along1
    beta_u = c2v[..., None] * along1 + (s2v * s2t)[..., None] * along2 + (s2v * c2t)[..., None] * along3
    beta_v = c2t[..., None] * along2 - s2t[..., None] * along3

    lam = np.broadcast_to(lambda_case2(beta.values), grid.shape).copy()
    return ConnectionForms(beta_t, beta_u, beta_v, grid, beta.provenance), LambdaField(lam)


class Case2Builder(CaseBuilder):
    """p = h·x·i·x⁻¹·h⁻¹ on the great sphere, q from a solution β of the beta_s3 equation."""

    case = 2

    def __init__(self, beta: ScalarField2D, h=ONE) -> None:
        self._beta = beta
        self._h = as_quat(h)

    def forms(self, grid: Grid3D) -> tuple[ConnectionForms, LambdaField]:
        return forms_case2(self._beta, grid, self._h)

    def points(self, grid: Grid3D) -> np.ndarray:
        return _rotated(self._h, chart(*grid.mesh()), I)

    def default_q0(self, grid: Grid3D) -> np.ndarray:
        x0 = chart(grid.t.start, grid.u.start, grid.v.start)
        return _rotated(self._h, x0, J)
