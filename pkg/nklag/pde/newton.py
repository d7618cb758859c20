"""Damped Newton iteration for the elliptic problems, and analytic solution families."""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import spsolve

from ..core.errors import DomainError, NoConvergenceError
from ..core.fd import interior_sup
from ..core.types import Grid2D, ScalarField2D
from .operators import operator_for
from .problem import EllipticProblem

logger = logging.getLogger("nklag")

MAX_HALVINGS = 20
# Multiple of the estimated evaluation round-off a stalled residual may sit at.
ROUND_OFF_SLACK = 16.0


def _interior_residual(operator, values, grid, source) -> np.ndarray:
    residual = operator.apply(values, grid)
    if source is not None:
        residual = residual - source.values[1:-1, 1:-1]
    return residual


def pde_residual(kind: str, field: ScalarField2D, source: ScalarField2D | None = None) -> ScalarField2D:
    """Interior residual of the kind's equation; boundary sites are NaN."""
    operator = operator_for(kind)
    grid = field.grid
    operator.validate(grid)
    out = np.full(field.shape, np.nan)
    out[1:-1, 1:-1] = _interior_residual(operator, field.values, grid, source)
    return ScalarField2D(out, field.u0, field.v0, field.hu, field.hv)


def round_off_floor(values: np.ndarray, grid: Grid2D) -> float:
    """Residual noise expected from evaluating the 5-point stencil on `values` in double precision."""
    scale = 1.0 + float(np.max(np.abs(values)))
    return float(np.finfo(np.float64).eps * scale * (4.0 / grid.u.step**2 + 4.0 / grid.v.step**2))


def solve_elliptic(prob: EllipticProblem, tol: float = 1e-10, max_iter: int = 50) -> ScalarField2D:
    """Newton's method with step halving until the interior sup-residual drops below `tol`.

    A residual that stops decreasing within `ROUND_OFF_SLACK` round-off floors
    of `tol` is accepted with a warning; it cannot be pushed lower in double
    precision.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    operator = operator_for(prob.kind)
    grid = prob.grid
    operator.validate(grid)

    values = prob.start()
    residual = _interior_residual(operator, values, grid, prob.source)
    norm = float(np.max(np.abs(residual)))

    for iteration in range(max_iter + 1):
        logger.debug(f"{prob.kind} newton iteration {iteration}: residual {norm:.3e}")
        if norm < tol:
            logger.info(f"{prob} converged in {iteration} iterations (residual {norm:.3e})")
            return ScalarField2D(values, grid.u.start, grid.v.start, grid.u.step, grid.v.step)
        if iteration == max_iter:
            break

        interior = values[1:-1, 1:-1]
        step = spsolve(operator.jacobian(interior, grid), -residual.ravel()).reshape(interior.shape)

        scale = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = values.copy()
            trial[1:-1, 1:-1] += scale * step
            trial_residual = _interior_residual(operator, trial, grid, prob.source)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if np.isfinite(trial_norm) and trial_norm < norm:
                break
            scale /= 2.0
        else:
            break

        if scale < 1.0:
            logger.debug(f"damped newton step by {scale:g}")
        values, residual, norm = trial, trial_residual, trial_norm

    floor = round_off_floor(values, grid)
    if norm < tol + ROUND_OFF_SLACK * floor:
        logger.warning(f"{prob.kind} stalled at residual {norm:.3e}, within round-off (floor {floor:.1e}) of tol {tol:g}")
        return ScalarField2D(values, grid.u.start, grid.v.start, grid.u.step, grid.v.step)
    if iteration < max_iter:
        raise NoConvergenceError(
            f"{prob.kind} residual stalled above tol; no damped Newton step decreases it", norm, iteration
        )
    raise NoConvergenceError(f"{prob.kind} did not converge", norm, max_iter)


def liouville_analytic(c: float, grid: Grid2D) -> ScalarField2D:
    """μ = ln(8c²/(1 + c²(u² + v²))²), the solution of Δμ = −e^μ for f(z) = cz."""
    if c <= 0:
        raise DomainError(f"Liouville family needs c > 0, got {c}")
    u, v = grid.mesh()
    denominator = 1.0 + c**2 * (u**2 + v**2)
    values = np.log(8.0 * c**2) - 2.0 * np.log(denominator)
    return ScalarField2D(
        values,
        grid.u.start,
        grid.v.start,
        grid.u.step,
        grid.v.step,
        -4.0 * c**2 * u / denominator,
        -4.0 * c**2 * v / denominator,
    )


def manufactured_sinh_gordon(amplitude: float, grid: Grid2D) -> tuple[ScalarField2D, ScalarField2D]:
    """ω = a·sin u·cos v and the source Δω + 8 sinh ω it solves exactly."""
    u, v = grid.mesh()
    values = amplitude * np.sin(u) * np.cos(v)
    origin = (grid.u.start, grid.v.start, grid.u.step, grid.v.step)
    solution = ScalarField2D(
        values, *origin, amplitude * np.cos(u) * np.cos(v), -amplitude * np.sin(u) * np.sin(v)
    )
    source = ScalarField2D(-2.0 * values + 8.0 * np.sinh(values), *origin)
    return solution, source


def sinh_gordon_wave(amplitude: float, grid: Grid2D, angle: float = 0.6) -> ScalarField2D:
    """Travelling wave ω(u cos a + v sin a) solving Δω = −8 sinh ω exactly.

    The profile has ω(0) = amplitude and ω′(0) = 0, so it is even and is
    integrated once over [0, max |s|].
    """
    u, v = grid.mesh()
    s = u * np.cos(angle) + v * np.sin(angle)
    reach = max(float(np.max(np.abs(s))), grid.u.step)
    profile = solve_ivp(
        lambda _, y: [y[1], -8.0 * np.sinh(y[0])],
        (0.0, reach),
        [amplitude, 0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    if not profile.success:
        raise DomainError(f"wave profile integration failed: {profile.message}")
    values, slope = profile.sol(np.abs(s).ravel()).reshape(2, *s.shape)
    slope = np.sign(s) * slope
    return ScalarField2D(
        values, grid.u.start, grid.v.start, grid.u.step, grid.v.step, np.cos(angle) * slope, np.sin(angle) * slope
    )


def residual_norm(kind: str, field: ScalarField2D, source: ScalarField2D | None = None) -> float:
    return interior_sup(pde_residual(kind, field, source).values)
