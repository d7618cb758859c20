"""Lagrangian immersions on which the frame-bundle map of the surface degenerates.

Here the gauge e^ω = tanΛ/√3 ties Λ to the conformal factor of the minimal
surface, and q solves ∂q = qβ with forms built from α₂ = p̄p_u and α₃ = p̄p_v alone.
"""

from __future__ import annotations

import numpy as np

from ..core.structure import SQRT3
from ..core.types import ConnectionForms, Grid3D, LambdaField, ScalarField2D
from .base import SurfaceCaseBuilder, SurfaceData


def lambda_case3(omega) -> np.ndarray:
    """Λ = arctan(√3 e^ω)."""
    return np.arctan(SQRT3 * np.exp(np.asarray(omega, dtype=np.float64)))


def e_frame(omega, omega_u, omega_v) -> np.ndarray:
    """Rows E₁, E₂, E₃ in the coordinate basis (∂t, ∂u, ∂v)."""
    omega, omega_u, omega_v = np.broadcast_arrays(
        *(np.asarray(x, dtype=np.float64) for x in (omega, omega_u, omega_v))
    )
    c = SQRT3 * np.exp(0.5 * omega) / (2.0 * np.sqrt(1.0 + 3.0 * np.exp(2.0 * omega)))
    out = np.zeros(omega.shape + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, :] = c[..., None] * np.stack([(omega_v - omega_u) / (2.0 * SQRT3), np.ones_like(c), np.ones_like(c)], axis=-1)
    out[..., 2, :] = -c[..., None] * np.stack([(omega_v + omega_u) / (2.0 * SQRT3), np.ones_like(c), -np.ones_like(c)], axis=-1)
    return out


def forms_case3(omega: ScalarField2D, grid: Grid3D, surface: SurfaceData | None = None) -> tuple[ConnectionForms, LambdaField]:
    surface = surface or SurfaceData.from_omega(omega, grid.surface)
    w, w_u, w_v = surface.omega
    e, e_minus = np.exp(w)[..., None], np.exp(-w)[..., None]
    n = surface.normal_form
    a2, a3 = surface.alpha2, surface.alpha3

    beta1 = -(SQRT3 / 4.0) * e_minus * n
    beta2 = (e_minus / 8.0) * (4.0 * e * a2 - 4.0 * a3 + w_v[..., None] * n)
    beta3 = -(e_minus / 8.0) * (4.0 * a2 - 4.0 * e * a3 + w_u[..., None] * n)

    shape = grid.shape + (3,)
    forms = ConnectionForms(
        np.broadcast_to(beta1, shape).copy(),
        np.broadcast_to(beta2, shape).copy(),
        np.broadcast_to(beta3, shape).copy(),
        grid,
        omega.provenance,
    )
    return forms, LambdaField(np.broadcast_to(lambda_case3(w), grid.shape).copy())


class Case3Builder(SurfaceCaseBuilder):
    """Minimal surface with conformal factor ω and the q of the degenerate frame-bundle case."""

    case = 3

    def forms(self, grid: Grid3D) -> tuple[ConnectionForms, LambdaField]:
        self.check_fields(grid, self._omega)
        return forms_case3(self._omega, grid, self.surface(grid))
