"""Lagrangian immersions from a minimal surface and a Liouville solution.

The angle function Λ solves (2√3e^ω/tanΛ − 2 sin 2t)² = e^{ω+μ} − 2 − 2cos 4t on
the open set V where the right-hand side is positive.
"""

from __future__ import annotations

import logging

import numpy as np

from ..core.errors import BranchError, OutsideDomainError
from ..core.structure import SQRT3
from ..core.types import ConnectionForms, CubicCoefficients, Grid3D, LambdaField, ScalarField2D
from .base import SurfaceCaseBuilder, SurfaceData

logger = logging.getLogger("nklag")

MARGIN = 1e-6
_BRANCH_EPS = 1e-12


def _first_site(bad: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.argwhere(np.atleast_1d(bad))[0])


def _lambda_parts(omega, mu, t, branch: int):
    omega, mu, t = np.broadcast_arrays(*(np.asarray(x, dtype=np.float64) for x in (omega, mu, t)))
    c = np.exp(omega + mu) - 2.0 - 2.0 * np.cos(4.0 * t)
    with np.errstate(invalid="ignore"):
        denominator = branch * np.sqrt(c) + 2.0 * np.sin(2.0 * t)
    return omega, c, denominator


def lambda_case1(omega, mu, t, branch: int = 1) -> np.ndarray:
    """tanΛ = 2√3e^ω / (ε₁√(e^{ω+μ} − 2 − 2cos 4t) + 2 sin 2t) with Λ in (0, π/2)."""
    omega, c, denominator = _lambda_parts(omega, mu, t, branch)
    if np.any(~(c > 0.0)):
        raise OutsideDomainError(
            f"e^(ω+μ) − 2 − 2cos(4t) = {np.min(c):.6g} ≤ 0 at site {_first_site(~(c > 0.0))}"
        )
    if np.any(denominator <= _BRANCH_EPS):
        raise BranchError(
            f"branch {branch:+d} gives tanΛ denominator {np.min(denominator):.6g} at site "
            f"{_first_site(denominator <= _BRANCH_EPS)}"
        )
    return np.arctan(2.0 * SQRT3 * np.exp(omega) / denominator)


def lambda_case1_field(omega, mu, t, branch: int = 1) -> LambdaField:
    """Λ on every site, NaN outside V or where the branch leaves (0, π/2)."""
    omega, c, denominator = _lambda_parts(omega, mu, t, branch)
    ok = (c > 0.0) & (denominator > _BRANCH_EPS)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(ok, np.arctan(2.0 * SQRT3 * np.exp(omega) / denominator), np.nan)
    return LambdaField(values, branch)


def tan_denominator(omega, t, lam) -> np.ndarray:
    """√3e^ω − sin 2t·tanΛ."""
    return SQRT3 * np.exp(omega) - np.sin(2.0 * t) * np.tan(lam)


def lambda_derivatives(omega, mu_u, mu_v, omega_u, omega_v, t, lam) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Λ_t, Λ_u, Λ_v) implied by the defining equation of Λ."""
    e = np.exp(omega)
    s2 = np.sin(2.0 * t)
    sin2 = np.sin(lam) ** 2
    cot = 1.0 / np.tan(lam)

    lam_t = -2.0 * np.cos(2.0 * t) * sin2 / tan_denominator(omega, t, lam)
    scale = 6.0 * e**2 * cot - 2.0 * SQRT3 * e * s2

    def along(m, w):
        return -sin2 * (m + e * cot * (3.0 * e * cot * (m - w) - 2.0 * SQRT3 * m * s2) + w) / scale

    return lam_t, along(mu_u, omega_u), along(mu_v, omega_v)


def cubic_coefficients(omega, mu_u, mu_v, omega_u, omega_v, t, lam) -> CubicCoefficients:
    e = np.exp(omega)
    sin_l, cos_l = np.sin(lam), np.cos(lam)
    m_u, m_v = mu_u + omega_u, mu_v + omega_v
    scale = np.exp(-1.5 * omega) * sin_l**2 / (6.0 * np.sqrt(2.0))

    h13 = -np.exp(-omega) * np.cos(2.0 * t) * sin_l**2
    h12 = (-np.exp(-omega) * np.sin(2.0 * t) * sin_l + cos_l / SQRT3) * sin_l
    h22 = scale * (
        3.0 * e * cos_l * ((omega_u - mu_u) * np.sin(t) + (mu_v - omega_v) * np.cos(t))
        - SQRT3 * sin_l * (m_u * np.cos(3.0 * t) + m_v * np.sin(3.0 * t))
    )
    h23 = scale * (
        SQRT3 * sin_l * (m_u * np.sin(3.0 * t) - m_v * np.cos(3.0 * t))
        - 3.0 * e * cos_l * (mu_u - omega_u) * np.cos(t)
        - 3.0 * e * cos_l * (mu_v - omega_v) * np.sin(t)
    )
    return CubicCoefficients(h13, h12, h22, h23)


def immersion_margin(omega, t, lam) -> np.ndarray:
    """1/√3 + h³₁₂ csc 2Λ; the frame-bundle map is an immersion where it is nonzero."""
    sin_l = np.sin(lam)
    h12 = (-np.exp(-omega) * np.sin(2.0 * t) * sin_l + np.cos(lam) / SQRT3) * sin_l
    return 1.0 / SQRT3 + h12 / np.sin(2.0 * lam)


def frame_relation(omega, mu_u, mu_v, omega_u, omega_v, t, lam) -> np.ndarray:
    """Rows E₁, E₂, E₃ in the coordinate basis (∂t, ∂u, ∂v)."""
    omega, mu_u, mu_v, omega_u, omega_v, t, lam = np.broadcast_arrays(
        *(np.asarray(x, dtype=np.float64) for x in (omega, mu_u, mu_v, omega_u, omega_v, t, lam))
    )
    e = np.exp(omega)
    sin_l, tan_l = np.sin(lam), np.tan(lam)
    m_u, m_v = mu_u + omega_u, mu_v + omega_v
    lead = np.exp(-1.5 * omega) * sin_l / (12.0 * np.sqrt(2.0))
    planar = np.exp(-0.5 * omega) * sin_l / np.sqrt(2.0)
    c, s = np.cos(t), np.sin(t)
    c3, s3 = np.cos(3.0 * t), np.sin(3.0 * t)

    out = np.zeros(omega.shape + (3, 3))
    out[..., 0, 0] = 0.5 * (SQRT3 - 2.0 * np.exp(-omega) * tan_l * s * c)
    out[..., 1, 0] = -lead * (SQRT3 * tan_l * (m_u * c3 + m_v * s3) + 3.0 * e * (m_u * s - m_v * c))
    out[..., 1, 1] = planar * c
    out[..., 1, 2] = planar * s
    out[..., 2, 0] = lead * (SQRT3 * tan_l * (m_u * s3 - m_v * c3) - 3.0 * e * (m_u * c + m_v * s))
    out[..., 2, 1] = -planar * s
    out[..., 2, 2] = planar * c
    return out


def codazzi_mu_laplacian(omega, lam, t) -> np.ndarray:
    """−4e^ω(cos 2Λ + 2)csc²Λ + 8√3 cotΛ sin 2t + 8 sinh ω, which equals −e^μ on V."""
    return (
        -4.0 * np.exp(omega) * (np.cos(2.0 * lam) + 2.0) / np.sin(lam) ** 2
        + 8.0 * SQRT3 * np.sin(2.0 * t) / np.tan(lam)
        + 8.0 * np.sinh(omega)
    )


def forms_case1(
    omega: ScalarField2D,
    mu: ScalarField2D,
    grid: Grid3D,
    branch: int = 1,
    surface: SurfaceData | None = None,
) -> tuple[ConnectionForms, LambdaField]:
    """Connection forms β₁, β₂, β₃ of q; inadmissible sites carry NaN."""
    surface = surface or SurfaceData.from_omega(omega, grid.surface)
    w, w_u, w_v = surface.omega
    m = mu.values
    m_u, m_v = mu.derivatives()
    t = grid.t.values[:, None, None]

    lam = lambda_case1_field(w, m, t, branch)
    values = lam.values
    with np.errstate(invalid="ignore", divide="ignore"):
        denominator = tan_denominator(w, t, values)
        margin = immersion_margin(w, t, values)
        admissible = lam.admissible() & (np.abs(denominator) > MARGIN) & (np.abs(margin) > MARGIN)

        tan_l, cot = np.tan(values), 1.0 / np.tan(values)
        c2, s2 = np.cos(2.0 * t), np.sin(2.0 * t)
        e_minus = np.exp(-w)
        sum_u, sum_v = m_u + w_u, m_v + w_v

        n = surface.normal_form
        a2, a3 = surface.alpha2, surface.alpha3

        beta1 = (-SQRT3 / (2.0 * denominator))[..., None] * n
        beta2 = 0.125 * (
            (e_minus * (sum_v - sum_u * c2 * tan_l / denominator))[..., None] * n
            - (4.0 * (SQRT3 * cot * c2 - 1.0))[..., None] * a2
            - (4.0 * SQRT3 * s2 * cot)[..., None] * a3
        )
        beta3 = 0.125 * (
            (-e_minus * (sum_u + sum_v * c2 * tan_l / denominator))[..., None] * n
            - (4.0 * SQRT3 * cot * s2)[..., None] * a2
            + (4.0 * (1.0 + SQRT3 * c2 * cot))[..., None] * a3
        )

    blank = ~admissible[..., None]
    beta1, beta2, beta3 = (np.where(blank, np.nan, b) for b in (beta1, beta2, beta3))
    provenance = "analytic" if omega.provenance == mu.provenance == "analytic" else "fd"
    masked = int(admissible.size - np.count_nonzero(admissible))
    if masked:
        logger.warning(f"case 1: {masked} of {admissible.size} sites are inadmissible and masked")
    return (
        ConnectionForms(beta1, beta2, beta3, grid, provenance, admissible),
        LambdaField(np.where(admissible, values, np.nan), branch),
    )


class Case1Builder(SurfaceCaseBuilder):
    """Minimal surface with conformal factor ω paired with a Liouville solution μ."""

    case = 1

    def __init__(
        self,
        omega: ScalarField2D,
        mu: ScalarField2D,
        branch: int = 1,
        surface: SurfaceData | None = None,
    ) -> None:
        super().__init__(omega, surface)
        self._mu = mu
        self._branch = branch

    def forms(self, grid: Grid3D) -> tuple[ConnectionForms, LambdaField]:
        self.check_fields(grid, self._omega, self._mu)
        return forms_case1(self._omega, self._mu, grid, self._branch, self.surface(grid))
