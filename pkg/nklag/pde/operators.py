"""The three elliptic equations of the constructions.

    sinh_gordon  Δω + 8 sinh ω = 0
    liouville    Δμ + e^μ = 0
    beta_s3      csc²(2v) β_uu + β_vv + 2cot(2v) β_v − 2(3e^{−4β} − 1) = 0
"""

import numpy as np
from scipy import sparse as sp

from ..core.errors import DomainError
from ..core.fd import laplacian
from ..core.types import Grid2D
from .base import EllipticOperator


def _second_difference(m: int) -> sp.spmatrix:
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(m, m))


def _centered_difference(m: int) -> sp.spmatrix:
    return sp.diags([-1.0, 1.0], [-1, 1], shape=(m, m))


def _interior_shape(grid: Grid2D) -> tuple[int, int]:
    n_u, n_v = grid.shape
    return n_u - 2, n_v - 2


def _laplacian_matrix(grid: Grid2D) -> sp.spmatrix:
    m_u, m_v = _interior_shape(grid)
    return sp.kron(_second_difference(m_u), sp.eye(m_v)) / grid.u.step**2 + sp.kron(
        sp.eye(m_u), _second_difference(m_v)
    ) / grid.v.step**2


class SinhGordon(EllipticOperator):
    kind = "sinh_gordon"

    def apply(self, values, grid):
        return laplacian(values, grid.u.step, grid.v.step)[1:-1, 1:-1] + 8.0 * np.sinh(values[1:-1, 1:-1])

    def linear_matrix(self, grid):
        return _laplacian_matrix(grid)

    def nonlinear_derivative(self, interior, grid):
        return 8.0 * np.cosh(interior)


class Liouville(EllipticOperator):
    kind = "liouville"

    def apply(self, values, grid):
        return laplacian(values, grid.u.step, grid.v.step)[1:-1, 1:-1] + np.exp(values[1:-1, 1:-1])

    def linear_matrix(self, grid):
        return _laplacian_matrix(grid)

    def nonlinear_derivative(self, interior, grid):
        return np.exp(interior)


class BetaS3(EllipticOperator):
    """Reduced equation of the totally geodesic case on the chart e^{iu}e^{jv}e^{it}."""

    kind = "beta_s3"

    def validate(self, grid):
        v = grid.v.values
        quarter = np.pi / 2
        distance = np.min(np.abs(v - np.round(v / quarter) * quarter))
        if distance < 10.0 * grid.v.step:
            raise DomainError(
                f"v-range [{grid.v.start:g}, {grid.v.stop:g}] comes within {distance:.3e} of sin(2v) = 0"
            )

    @staticmethod
    def _coefficients(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
        v = grid.v.values[1:-1]
        return 1.0 / np.sin(2.0 * v) ** 2, 2.0 / np.tan(2.0 * v)

    def apply(self, values, grid):
        hu, hv = grid.u.step, grid.v.step
        centre = values[1:-1, 1:-1]
        beta_uu = (values[2:, 1:-1] - 2.0 * centre + values[:-2, 1:-1]) / hu**2
        beta_vv = (values[1:-1, 2:] - 2.0 * centre + values[1:-1, :-2]) / hv**2
        beta_v = (values[1:-1, 2:] - values[1:-1, :-2]) / (2.0 * hv)
        csc2, cot2 = self._coefficients(grid)
        return csc2 * beta_uu + beta_vv + cot2 * beta_v - 2.0 * (3.0 * np.exp(-4.0 * centre) - 1.0)

    def linear_matrix(self, grid):
        m_u, m_v = _interior_shape(grid)
        hu, hv = grid.u.step, grid.v.step
        csc2, cot2 = self._coefficients(grid)
        along_v = _second_difference(m_v) / hv**2 + sp.diags(cot2) @ _centered_difference(m_v) / (2.0 * hv)
        return sp.kron(_second_difference(m_u) / hu**2, sp.diags(csc2)) + sp.kron(sp.eye(m_u), along_v)

    def nonlinear_derivative(self, interior, grid):
        return 24.0 * np.exp(-4.0 * interior)


OPERATORS: dict[str, EllipticOperator] = {op.kind: op for op in (SinhGordon(), Liouville(), BetaS3())}


def operator_for(kind: str) -> EllipticOperator:
    try:
        return OPERATORS[kind]
    except KeyError:
        raise DomainError(f"unknown equation kind {kind!r}, expected one of {sorted(OPERATORS)}") from None
