"""Dirichlet problems and their perimeter layout."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..core.errors import DomainError
from ..core.types import Grid2D, ScalarField2D
from .operators import operator_for

InitialGuess = Literal["zero", "boundary_mean"]


def perimeter_indices(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """(i, j) of the perimeter: bottom row, right column, top row reversed, left column reversed."""
    n_u, n_v = shape
    u_up = np.arange(n_u)
    v_up = np.arange(1, n_v)
    u_down = np.arange(n_u - 2, -1, -1)
    v_down = np.arange(n_v - 2, 0, -1)
    i = np.concatenate([u_up, np.full(v_up.size, n_u - 1), u_down, np.zeros(v_down.size, dtype=int)])
    j = np.concatenate([np.zeros(n_u, dtype=int), v_up, np.full(u_down.size, n_v - 1), v_down])
    return i, j


def perimeter_of(values: np.ndarray) -> np.ndarray:
    return values[perimeter_indices(values.shape)]


@dataclass
class EllipticProblem:
    kind: str
    grid: Grid2D
    dirichlet: np.ndarray
    source: ScalarField2D | None = None
    initial_guess: InitialGuess = "zero"

    def __post_init__(self) -> None:
        operator_for(self.kind)
        self.dirichlet = np.asarray(self.dirichlet, dtype=np.float64)
        n_u, n_v = self.grid.shape
        if n_u < 3 or n_v < 3:
            raise DomainError(f"elliptic problems need at least 3x3 sites, got {n_u}x{n_v}")
        expected = 2 * (n_u + n_v) - 4
        if self.dirichlet.shape != (expected,):
            raise DomainError(f"dirichlet data must have {expected} perimeter values, got {self.dirichlet.shape}")
        if self.source is not None and self.source.shape != self.grid.shape:
            raise DomainError(f"source shape {self.source.shape} does not match grid {self.grid.shape}")
        if self.initial_guess not in ("zero", "boundary_mean"):
            raise DomainError(f"unknown initial guess {self.initial_guess!r}")

    def __str__(self) -> str:
        n_u, n_v = self.grid.shape
        return f"{type(self).__name__}(kind={self.kind}, {n_u}x{n_v})"

    def start(self) -> np.ndarray:
        """Initial full-grid values carrying the Dirichlet data."""
        fill = float(np.mean(self.dirichlet)) if self.initial_guess == "boundary_mean" else 0.0
        values = np.full(self.grid.shape, fill)
        values[perimeter_indices(self.grid.shape)] = self.dirichlet
        return values

    @staticmethod
    def from_field(kind: str, field: ScalarField2D, **kwargs) -> EllipticProblem:
        """Problem whose Dirichlet data is the perimeter of `field`."""
        return EllipticProblem(kind, field.grid, perimeter_of(field.values), **kwargs)
