"""Integrability of the connection forms and reconstruction of q from ∂q = qβ."""

from __future__ import annotations

import logging

import numpy as np

from ..core.errors import DomainError, PathDependenceError
from ..core.fd import derivative, interior_sup
from ..core.quat import as_quat, imcross, qexp_im, qmul, qnorm
from ..core.types import ConnectionForms

logger = logging.getLogger("nklag")

LOOP_TOLERANCE = 1e-4


def _inner(n: int, margin: int) -> slice:
    return slice(margin, n - margin) if n > 2 * margin else slice(1, n - 1)


def integrability_fields(forms: ConnectionForms) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """R₁₂, R₁₃, R₃₂ on the whole grid, derivatives by finite differences."""
    h_t, h_u, h_v = forms.grid.steps
    b1, b2, b3 = forms.beta1, forms.beta2, forms.beta3
    r12 = derivative(b1, h_u, 1) - derivative(b2, h_t, 0) - 2.0 * imcross(b1, b2)
    r13 = derivative(b1, h_v, 2) - derivative(b3, h_t, 0) - 2.0 * imcross(b1, b3)
    r32 = derivative(b3, h_u, 1) - derivative(b2, h_v, 2) - 2.0 * imcross(b3, b2)
    return r12, r13, r32


def integrability_residual(forms: ConnectionForms, margin: int = 2) -> tuple[float, float, float]:
    """Sup-norms of the three zero-curvature residuals, `margin` sites inside each face; masked sites are skipped."""
    if margin < 0:
        raise DomainError(f"edge margin must be non-negative, got {margin}")
    inner = tuple(_inner(n, margin) for n in forms.grid.shape)
    return tuple(
        interior_sup(np.linalg.norm(field, axis=-1)[inner]) for field in integrability_fields(forms)
    )


def _midpoint_weights(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lagrange weights for the value halfway between nodes k and k+1 of an n-node line."""
    width = min(4, n)
    first = min(max(k - 1, 0), n - width)
    nodes = np.arange(first, first + width)
    x = k + 0.5
    weights = np.array(
        [np.prod([(x - m) / (j - m) for m in nodes if m != j]) for j in nodes]
    )
    return nodes, weights


def _march(q_start: np.ndarray, betas: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order Magnus steps along the leading axis of `betas`.

    q_start has shape S + (4,), betas shape (n,) + S + (3,); returns (n,) + S + (4,).
    """
    n = betas.shape[0]
    out = np.empty((n,) + q_start.shape)
    out[0] = q_start
    q = q_start
    for k in range(n - 1):
        start, end = betas[k], betas[k + 1]
        nodes, weights = _midpoint_weights(n, k)
        half = np.tensordot(weights, betas[nodes], axes=(0, 0))
        half = np.where(np.isfinite(half), half, 0.5 * (start + end))
        exponent = (h / 6.0) * (start + 4.0 * half + end) + (h * h / 6.0) * imcross(start, end)
        q = qmul(q, qexp_im(exponent))
        out[k + 1] = q
    return out


def _spanning(forms: ConnectionForms, q0: np.ndarray, second: str) -> np.ndarray:
    """Integrate along t at (u0, v0), then over the `second` axis, then the remaining one."""
    h_t, h_u, h_v = forms.grid.steps
    line = _march(q0, forms.beta1[:, 0, 0], h_t)

    if second == "u":
        plane = np.swapaxes(_march(line, np.swapaxes(forms.beta2[:, :, 0], 0, 1), h_u), 0, 1)
        full = _march(plane, np.moveaxis(forms.beta3, 2, 0), h_v)
        return np.moveaxis(full, 0, 2)

    plane = np.swapaxes(_march(line, np.swapaxes(forms.beta3[:, 0, :], 0, 1), h_v), 0, 1)
    full = _march(plane, np.moveaxis(forms.beta2, 1, 0), h_u)
    return np.moveaxis(full, 0, 1)


def integrate_q(forms: ConnectionForms, q0) -> tuple[np.ndarray, float]:
    """Solve ∂q = qβ on the grid from q0 at the origin site.

    Returns the (t, u, v)-ordered solution and its sup distance to the (t, v, u)
    order. Non-finite forms leave NaN downstream.
    """
    q0 = as_quat(q0)
    if abs(float(qnorm(q0)) - 1.0) > 1e-12:
        raise DomainError(f"q0 must be a unit quaternion, got norm {float(qnorm(q0))!r}")

    q = _spanning(forms, q0, "u")
    other = _spanning(forms, q0, "v")

    gap = np.max(np.abs(q - other), axis=-1)
    if not np.any(np.isfinite(gap)):
        return q, float("nan")
    site = np.unravel_index(np.nanargmax(gap), gap.shape)
    defect = float(gap[site])
    logger.debug(f"integrate_q loop-closure defect {defect:.3e} at site {site}")
    if defect > LOOP_TOLERANCE:
        raise PathDependenceError(defect, tuple(int(i) for i in site))
    return q, defect
