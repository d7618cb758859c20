"""Closed-form immersions into S³×S³ used as oracles by the verifier and the tests."""

from __future__ import annotations

import numpy as np

from .builder.case2 import chart, chart_tangents
from .core.quat import I, J, ONE, as_quat, conjugate_by, qexp_im, qmul
from .surface import clifford_patch
from .verify.base import ClosedFormImmersion

SITES = ((0.1, 0.2, 0.6), (-0.3, 0.5, 0.9), (0.7, -0.4, 1.2))


def _conjugation_tangents(x: np.ndarray, dx: np.ndarray, a: np.ndarray) -> np.ndarray:
    """d(x a x⁻¹) = dx·a·x⁻¹ + x·a·dx⁻¹ for unit x, where dx⁻¹ is the conjugate of dx."""
    x_bar = x * np.array([1.0, -1.0, -1.0, -1.0])
    dx_bar = dx * np.array([1.0, -1.0, -1.0, -1.0])
    x = x[..., None, :]
    return qmul(qmul(dx, a), x_bar[..., None, :]) + qmul(qmul(x, a), dx_bar)


class TotallyGeodesic(ClosedFormImmersion):
    """x ↦ (1, x); every angle function equals π/3."""

    name = "totally_geodesic"
    sample_sites = SITES

    def point(self, t, u, v):
        x = chart(t, u, v)
        return np.broadcast_to(ONE, x.shape).copy(), x

    def tangents(self, t, u, v):
        dx = chart_tangents(t, u, v)
        return np.zeros_like(dx), dx


class ConstantCurvatureSphere(ClosedFormImmersion):
    """x ↦ (x i x⁻¹, x j x⁻¹), the round sphere."""

    name = "constant_curvature_sphere"
    sample_sites = SITES

    def point(self, t, u, v):
        x = chart(t, u, v)
        return conjugate_by(x, I), conjugate_by(x, J)

    def tangents(self, t, u, v):
        x, dx = chart(t, u, v), chart_tangents(t, u, v)
        return _conjugation_tangents(x, dx, I), _conjugation_tangents(x, dx, J)


class FlatTorus(ClosedFormImmersion):
    """(u, v, w) ↦ (p(u, w), q(u, v)), a flat Lagrangian torus.

    p(u, w) = (cos u cos w, cos u sin w, sin u cos w, sin u sin w) and
    q(u, v) = (cos v(sin u + cos u), sin v(sin u + cos u), cos v(sin u − cos u), sin v(sin u − cos u))/√2.
    """

    name = "flat_torus"
    sample_sites = ((0.0, 0.0, 0.0), (0.3, -0.2, 0.5), (1.1, 0.7, -0.4))

    def point(self, u, v, w):
        u, v, w = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (u, v, w)))
        cu, su, cv, sv, cw, sw = np.cos(u), np.sin(u), np.cos(v), np.sin(v), np.cos(w), np.sin(w)
        plus, minus = su + cu, su - cu
        p = np.stack([cu * cw, cu * sw, su * cw, su * sw], axis=-1)
        q = np.stack([cv * plus, sv * plus, cv * minus, sv * minus], axis=-1) / np.sqrt(2.0)
        return p, q

    def tangents(self, u, v, w):
        u, v, w = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (u, v, w)))
        cu, su, cv, sv, cw, sw = np.cos(u), np.sin(u), np.cos(v), np.sin(v), np.cos(w), np.sin(w)
        plus, minus = su + cu, su - cu
        zero = np.zeros_like(u)
        dp = np.stack(
            [
                np.stack([-su * cw, -su * sw, cu * cw, cu * sw], axis=-1),
                np.stack([zero, zero, zero, zero], axis=-1),
                np.stack([-cu * sw, cu * cw, -su * sw, su * cw], axis=-1),
            ],
            axis=-2,
        )
        dq = np.stack(
            [
                np.stack([-cv * minus, -sv * minus, cv * plus, sv * plus], axis=-1),
                np.stack([-sv * plus, cv * plus, -sv * minus, cv * minus], axis=-1),
                np.stack([zero, zero, zero, zero], axis=-1),
            ],
            axis=-2,
        ) / np.sqrt(2.0)
        return dp, dq


class ProductControl(ClosedFormImmersion):
    """(t, u, v) ↦ (Clifford p(u, v), q₀e^{ti}); not Lagrangian."""

    name = "product_control"
    sample_sites = SITES

    def __init__(self, q0=ONE) -> None:
        self.q0 = as_quat(q0)

    def point(self, t, u, v):
        t, u, v = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (t, u, v)))
        q = qmul(self.q0, qexp_im(t[..., None] * I[1:]))
        return clifford_patch(u, v, -1).p, q

    def tangents(self, t, u, v):
        t, u, v = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (t, u, v)))
        surface = clifford_patch(u, v, -1)
        q = qmul(self.q0, qexp_im(t[..., None] * I[1:]))
        zero = np.zeros_like(surface.p)
        dp = np.stack([zero, surface.du, surface.dv], axis=-2)
        dq = np.stack([qmul(q, I), zero, zero], axis=-2)
        return dp, dq


totally_geodesic = TotallyGeodesic()
constant_curvature_sphere = ConstantCurvatureSphere()
flat_torus = FlatTorus()
product_control = ProductControl()

FIXTURES: dict[str, ClosedFormImmersion] = {
    f.name: f for f in (totally_geodesic, constant_curvature_sphere, flat_torus, product_control)
}
