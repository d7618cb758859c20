"""Define the `EllipticOperator` interface."""

import abc

import numpy as np
from scipy import sparse as sp

from ..core.types import Grid2D


class EllipticOperator(abc.ABC):
    """Semilinear operator L[f] + F(f) on a rectangle, discretised by finite differences."""

    kind: str

    def validate(self, grid: Grid2D) -> None:
        """Raise `DomainError` when the operator is singular on `grid`."""

    @abc.abstractmethod
    def apply(self, values: np.ndarray, grid: Grid2D) -> np.ndarray:
        """Return L[f] + F(f) on the interior sites."""

    @abc.abstractmethod
    def linear_matrix(self, grid: Grid2D) -> sp.spmatrix:
        """Return the interior-to-interior matrix of L."""

    @abc.abstractmethod
    def nonlinear_derivative(self, interior: np.ndarray, grid: Grid2D) -> np.ndarray:
        """Return F′(f) on the interior sites."""

    def jacobian(self, interior: np.ndarray, grid: Grid2D) -> sp.csc_matrix:
        diagonal = sp.diags(self.nonlinear_derivative(interior, grid).ravel(), offsets=0)
        return (self.linear_matrix(grid) + diagonal).tocsc()
