"""Minimal surfaces in S³ in the isothermal gauge.

The surface p(u, v) has metric 2e^ω(du² + dv²) and Hopf differential
σ(∂z, ∂z) = s, with s = −1 the gauge the constructions use. Expanding the
complex Gauss–Weingarten equations p_zz̄ = −e^ω p, p_zz = ω_z p_z + sN and
N_z = −s e^{−ω} p_z̄ into real coordinates gives

    p_uu = ½(ω_u p_u − ω_v p_v) + 2sN − 2e^ω p
    p_vv = −½(ω_u p_u − ω_v p_v) − 2sN − 2e^ω p
    p_uv = ½(ω_v p_u + ω_u p_v)
    N_u  = −s e^{−ω} p_u
    N_v  = s e^{−ω} p_v

and the compatibility condition Δω = −8 sinh ω for either sign.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Callable

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .core.errors import DomainError, IntegrationError
from .core.fd import derivative, laplacian, second_derivative
from .core.quat import I, ONE, as_quat, conjugate_by, qinner, qnorm
from .core.types import FrameSample, Grid2D, ScalarField2D

logger = logging.getLogger("nklag")

OmegaSampler = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]

SEED_TOLERANCE = {"tangency": 1e-10, "conformal": 1e-8, "orientation": 1e-8, "unit": 1e-10}
DRIFT_TOLERANCE = 1e-6
BRANCH_TOLERANCE = 1e-8
RENORM_EVERY = 32


def clifford_patch(u, v, normal_sign: int = -1) -> FrameSample:
    """Clifford torus e^{ib}e^{ja} with a = u + s·v, b = u − s·v.

    It is in the ω = 0 gauge with σ(∂z, ∂z) = s, s = normal_sign.
    """
    if normal_sign not in (1, -1):
        raise DomainError(f"normal_sign must be ±1, got {normal_sign}")
    s = normal_sign
    u, v = np.broadcast_arrays(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
    a, b = u + s * v, u - s * v
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)

    p = np.stack([ca * cb, ca * sb, sa * cb, sa * sb], axis=-1)
    p_a = np.stack([-sa * cb, -sa * sb, ca * cb, ca * sb], axis=-1)
    p_b = np.stack([-ca * sb, ca * cb, -sa * sb, sa * cb], axis=-1)
    normal = s * np.stack([sa * sb, -sa * cb, -ca * sb, ca * cb], axis=-1)
    return FrameSample(p, p_a + p_b, s * (p_a - p_b), normal)


def geodesic_sphere_patch(x, tol: float = 1e-12) -> FrameSample:
    """The point p = x·i·x⁻¹ of the great sphere of unit imaginary quaternions.

    Tangents are √2·x·j·x⁻¹ and √2·x·k·x⁻¹, the normal is −1; σ ≡ 0.
    """
    x = as_quat(x)
    drift = np.max(np.abs(qnorm(x) - 1.0))
    if drift > tol:
        raise DomainError(f"x must be a unit quaternion (norm drift {drift:.3e})")

    p = conjugate_by(x, I)
    du = np.sqrt(2.0) * conjugate_by(x, np.array([0.0, 0.0, 1.0, 0.0]))
    dv = np.sqrt(2.0) * conjugate_by(x, np.array([0.0, 0.0, 0.0, 1.0]))
    return FrameSample(p, du, dv, np.broadcast_to(-ONE, p.shape).copy())


def seed_frame(omega0: float, u0: float = 0.0, v0: float = 0.0, sign: int = -1) -> FrameSample:
    """Clifford frame at (u0, v0) with p_u, p_v rescaled to length √(2e^ω₀)."""
    seed = clifford_patch(u0, v0, sign)
    scale = np.exp(0.5 * omega0)
    return FrameSample(seed.p, scale * seed.du, scale * seed.dv, seed.N)


def frame_equations(p, p_u, p_v, normal, omega, omega_u, omega_v, sign: int = -1):
    """Return (p_uu, p_uv, p_vv, N_u, N_v) from the real-coordinate frame equations."""
    omega, omega_u, omega_v = (np.asarray(x, dtype=np.float64)[..., None] for x in (omega, omega_u, omega_v))
    e_plus, e_minus = np.exp(omega), np.exp(-omega)

    shear = 0.5 * (omega_u * p_u - omega_v * p_v)
    p_uu = shear + 2.0 * sign * normal - 2.0 * e_plus * p
    p_vv = -shear - 2.0 * sign * normal - 2.0 * e_plus * p
    p_uv = 0.5 * (omega_v * p_u + omega_u * p_v)
    return p_uu, p_uv, p_vv, -sign * e_minus * p_u, sign * e_minus * p_v


def sinh_gordon_residual(omega: ScalarField2D) -> ScalarField2D:
    """Δω + 8 sinh ω with the 5-point Laplacian; boundary sites are NaN."""
    values = laplacian(omega.values, omega.hu, omega.hv) + 8.0 * np.sinh(omega.values)
    return ScalarField2D(values, omega.u0, omega.v0, omega.hu, omega.hv)


@dataclass
class SecondForm:
    uu: np.ndarray
    uv: np.ndarray
    vv: np.ndarray
    mean_curvature: np.ndarray

    def hopf(self) -> np.ndarray:
        """σ(∂z, ∂z) = ¼(σ_uu − σ_vv − 2iσ_uv)."""
        return 0.25 * (self.uu - self.vv - 2j * self.uv)


def second_form(samples: FrameSample) -> SecondForm:
    """σ_ab = ⟨∂a∂b p, N⟩ by finite differences on the sample grid."""
    if samples.grid is None:
        raise DomainError("second_form needs a FrameSample grid")
    hu, hv = samples.grid.u.step, samples.grid.v.step

    p_uu = second_derivative(samples.p, hu, 0)
    p_vv = second_derivative(samples.p, hv, 1)
    p_uv = derivative(derivative(samples.p, hu, 0), hv, 1)

    uu = qinner(p_uu, samples.N)
    uv = qinner(p_uv, samples.N)
    vv = qinner(p_vv, samples.N)
    metric_trace = qinner(samples.du, samples.du) + qinner(samples.dv, samples.dv)
    return SecondForm(uu, uv, vv, (uu + vv) / metric_trace)


def frame_lift(samples: FrameSample, t) -> np.ndarray:
    """𝒫 = (p, cos t·e_u + sin t·e_v, −sin t·e_u + cos t·e_v, N) as column matrices."""
    e_u = samples.du / qnorm(samples.du)[..., None]
    e_v = samples.dv / qnorm(samples.dv)[..., None]
    t = np.asarray(t, dtype=np.float64)[..., None]
    c, s = np.cos(t), np.sin(t)
    return np.stack([samples.p, c * e_u + s * e_v, -s * e_u + c * e_v, samples.N], axis=-1)


def maurer_cartan(omega, omega_u, omega_v, t, sign: int = -1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients (Ω_u, Ω_v, Ω_t) of Ω = −𝒫ᵀd𝒫, so that ∂_x 𝒫 = −𝒫Ω_x."""
    omega, omega_u, omega_v, t = np.broadcast_arrays(
        *(np.asarray(x, dtype=np.float64) for x in (omega, omega_u, omega_v, t))
    )
    tangent = np.sqrt(2.0) * np.exp(omega / 2.0)
    normal = np.sqrt(2.0) * np.exp(-omega / 2.0)
    c, s = np.cos(t), np.sin(t)

    upper_u = {
        (0, 1): tangent * c,
        (0, 2): -tangent * s,
        (1, 2): -0.5 * omega_v,
        (1, 3): sign * normal * c,
        (2, 3): -sign * normal * s,
    }
    upper_v = {
        (0, 1): tangent * s,
        (0, 2): tangent * c,
        (1, 2): 0.5 * omega_u,
        (1, 3): -sign * normal * s,
        (2, 3): -sign * normal * c,
    }
    upper_t = {(1, 2): np.ones_like(t)}
    return tuple(_skew(upper, omega.shape) for upper in (upper_u, upper_v, upper_t))


def _skew(upper: dict, shape: tuple) -> np.ndarray:
    out = np.zeros(shape + (4, 4))
    for (a, b), value in upper.items():
        out[..., a, b] = value
        out[..., b, a] = -value
    return out


class _SplineOmega:
    """ω and its first derivatives anywhere on the grid rectangle."""

    def __init__(self, omega: ScalarField2D):
        grid = omega.grid
        u, v = grid.u.values, grid.v.values
        self._box = (u[0], u[-1], v[0], v[-1])
        kx, ky = min(3, len(u) - 1), min(3, len(v) - 1)
        self._value = RectBivariateSpline(u, v, omega.values, kx=kx, ky=ky)
        self._analytic = omega.provenance == "analytic"
        if self._analytic:
            du, dv = omega.derivatives()
            self._du = RectBivariateSpline(u, v, du, kx=kx, ky=ky)
            self._dv = RectBivariateSpline(u, v, dv, kx=kx, ky=ky)

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64))
        u = np.clip(u, self._box[0], self._box[1])
        v = np.clip(v, self._box[2], self._box[3])
        value = self._value.ev(u, v)
        if self._analytic:
            return value, self._du.ev(u, v), self._dv.ev(u, v)
        return value, self._value.ev(u, v, dx=1), self._value.ev(u, v, dy=1)


def _rhs(state, u, v, along: str, sampler: OmegaSampler, sign: int) -> np.ndarray:
    p, p_u, p_v, normal = state[..., 0, :], state[..., 1, :], state[..., 2, :], state[..., 3, :]
    p_uu, p_uv, p_vv, n_u, n_v = frame_equations(p, p_u, p_v, normal, *sampler(u, v), sign=sign)
    if along == "u":
        return np.stack([p_u, p_uu, p_uv, n_u], axis=-2)
    return np.stack([p_v, p_uv, p_vv, n_v], axis=-2)


def _project(state, u, v, sampler: OmegaSampler) -> np.ndarray:
    """Polar-project (p, e_u, e_v, N) onto SO(4) and restore |p_u| = |p_v| = √(2e^ω)."""
    omega, _, _ = sampler(u, v)
    scale = np.sqrt(2.0 * np.exp(omega))[..., None]
    rows = state.copy()
    rows[..., 1, :] /= scale
    rows[..., 2, :] /= scale
    left, _, right = np.linalg.svd(rows)
    rows = left @ right
    rows[..., 1, :] *= scale
    rows[..., 2, :] *= scale
    return rows


def _march(state, fixed, start: float, h: float, steps: int, along: str, sampler, sign: int) -> np.ndarray:
    """RK4 along u (v = fixed) or along v (u = fixed), vectorised over `fixed`."""
    fixed = np.asarray(fixed, dtype=np.float64)
    out = np.empty((steps + 1,) + state.shape)
    out[0] = state

    def at(x):
        return (x, fixed) if along == "u" else (fixed, x)

    for k in range(steps):
        x = start + k * h
        k1 = _rhs(state, *at(x), along, sampler, sign)
        k2 = _rhs(state + 0.5 * h * k1, *at(x + 0.5 * h), along, sampler, sign)
        k3 = _rhs(state + 0.5 * h * k2, *at(x + 0.5 * h), along, sampler, sign)
        k4 = _rhs(state + h * k3, *at(x + h), along, sampler, sign)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) % RENORM_EVERY == 0:
            logger.debug(f"renormalising frame after {k + 1} steps along {along}")
            state = _project(state, *at(x + h), sampler)
        out[k + 1] = state
    return out


def integrate_surface(
    omega: ScalarField2D,
    seed: FrameSample,
    sign: int = -1,
    sampler: OmegaSampler | None = None,
) -> FrameSample:
    """Rebuild the minimal surface of conformal factor ω from a seed frame at the grid origin.

    Marches the first u-line at v0, then every v-line at once; the loop
    defect is the sup distance to the v-first order.
    """
    grid = omega.grid
    sampler = sampler or _SplineOmega(omega)
    omega0 = omega.values[0, 0]

    defects = seed.gauge_defects(omega0)
    for name, tol in SEED_TOLERANCE.items():
        if defects[name] > tol:
            raise DomainError(f"seed frame violates the {name} invariant ({defects[name]:.3e} > {tol:g})")

    state = np.stack([seed.p, seed.du, seed.dv, seed.N], axis=-2)
    (n_u, n_v), (u0, v0), (hu, hv) = grid.shape, (grid.u.start, grid.v.start), (grid.u.step, grid.v.step)

    u_line = _march(state[None], [v0], u0, hu, n_u - 1, "u", sampler, sign)[:, 0]
    u_first = np.swapaxes(_march(u_line, grid.u.values, v0, hv, n_v - 1, "v", sampler, sign), 0, 1)

    v_line = _march(state[None], [u0], v0, hv, n_v - 1, "v", sampler, sign)[:, 0]
    v_first = _march(v_line, grid.v.values, u0, hu, n_u - 1, "u", sampler, sign)

    loop_defect = float(np.max(np.abs(u_first[..., 0, :] - v_first[..., 0, :])))
    logger.debug(f"surface integration loop defect {loop_defect:.3e}")

    result = FrameSample(
        u_first[..., 0, :], u_first[..., 1, :], u_first[..., 2, :], u_first[..., 3, :], grid, loop_defect
    )
    _check_integrated(result, omega.values)
    logger.info(f"integrated surface on {n_u}x{n_v} grid")
    return result


def _check_integrated(samples: FrameSample, omega: np.ndarray) -> None:
    length = qnorm(samples.du)
    branch = length < BRANCH_TOLERANCE * np.sqrt(2.0 * np.exp(omega))
    if np.any(branch):
        site = tuple(int(i) for i in np.argwhere(branch)[0])
        raise IntegrationError("reconstructed dp degenerates (branch point)", site)

    for name, defect in samples.gauge_defects(omega).items():
        if not np.isfinite(defect) or defect > DRIFT_TOLERANCE:
            raise IntegrationError(f"{name} invariant drifted to {defect:.3e}")


def surface_grid(grid: Grid2D, patch: Callable[..., FrameSample], **kwargs) -> FrameSample:
    """Evaluate a closed-form patch on every grid site."""
    uu, vv = grid.mesh()
    samples = patch(uu, vv, **kwargs)
    samples.grid = grid
    return samples
