"""Define the `CaseBuilder` interface."""

from __future__ import annotations

import abc
from dataclasses import dataclass
import logging

import numpy as np

from ..core.errors import DomainError, OutsideDomainError
from ..core.quat import ONE, as_quat, im_part, imcross, qconj, qmul
from ..core.types import ConnectionForms, FrameSample, Grid2D, Grid3D, ImmersionGrid, LambdaField, ScalarField2D
from ..surface import clifford_patch, integrate_surface, seed_frame, surface_grid
from ..verify.tangents import lagrangian_field
from .integrate import integrability_residual, integrate_q

logger = logging.getLogger("nklag")


def _same_axes(field: ScalarField2D, grid: Grid2D) -> bool:
    own = field.grid
    return field.shape == grid.shape and all(
        np.isclose(a.start, b.start) and np.isclose(a.step, b.step) for a, b in ((own.u, grid.u), (own.v, grid.v))
    )


@dataclass
class SurfaceData:
    """A minimal surface p with its conformal factor, sampled on the (u, v) grid."""

    samples: FrameSample
    omega: tuple[np.ndarray, np.ndarray, np.ndarray]

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.samples.p.shape[:-1]})"

    @property
    def alpha2(self) -> np.ndarray:
        """p̄p_u as an imaginary quaternion."""
        return im_part(qmul(qconj(self.samples.p), self.samples.du))

    @property
    def alpha3(self) -> np.ndarray:
        return im_part(qmul(qconj(self.samples.p), self.samples.dv))

    @property
    def normal_form(self) -> np.ndarray:
        """α₂ × α₃."""
        return imcross(self.alpha2, self.alpha3)

    @staticmethod
    def from_omega(omega: ScalarField2D, grid: Grid2D) -> SurfaceData:
        """Closed-form Clifford torus when ω ≡ 0, otherwise integrate from the Clifford seed."""
        if not _same_axes(omega, grid):
            raise DomainError(f"{omega} does not live on {grid.u} x {grid.v}")
        w_u, w_v = omega.derivatives()
        if not np.any(omega.values) and not np.any(w_u) and not np.any(w_v):
            samples = surface_grid(grid, clifford_patch, normal_sign=-1)
        else:
            seed = seed_frame(float(omega.values[0, 0]), grid.u.start, grid.v.start)
            samples = integrate_surface(omega, seed)
        return SurfaceData(samples, (omega.values, w_u, w_v))


class CaseBuilder(abc.ABC):
    """Interface for the three reverse constructions."""

    case: int

    def __str__(self) -> str:
        return f"{type(self).__name__}(case={self.case})"

    @abc.abstractmethod
    def forms(self, grid: Grid3D) -> tuple[ConnectionForms, LambdaField]:
        """Return the connection forms of q and the angle function Λ."""

    @abc.abstractmethod
    def points(self, grid: Grid3D) -> np.ndarray:
        """Return the first factor p on every site of the grid."""

    def default_q0(self, grid: Grid3D) -> np.ndarray:
        """Return q at the grid origin when none is given."""
        return ONE.copy()

    @staticmethod
    def check_fields(grid: Grid3D, *fields: ScalarField2D) -> None:
        for field in fields:
            if not _same_axes(field, grid.surface):
                raise DomainError(f"{field} does not live on the (u, v) axes {grid.u} x {grid.v}")

    def build(self, grid: Grid3D, q0=None) -> ImmersionGrid:
        """Integrate q, pair it with p and attach Λ and the diagnostics."""
        if min(grid.shape) < 3:
            raise DomainError(f"need at least 3 samples per axis, got {grid.shape}")
        forms, lam = self.forms(grid)
        if not np.any(forms.mask):
            raise OutsideDomainError(f"case {self.case}: no admissible site on the grid")
        if not forms.mask[0, 0, 0]:
            raise OutsideDomainError(f"case {self.case}: the grid origin (0, 0, 0) is not admissible")

        q0 = self.default_q0(grid) if q0 is None else as_quat(q0)
        q, loop = integrate_q(forms, q0)
        p = self.points(grid)
        reached = forms.mask & np.all(np.isfinite(q), axis=-1)
        blank = ~reached[..., None]
        immersion = ImmersionGrid(
            grid,
            np.where(blank, np.nan, p),
            np.where(blank, np.nan, q),
            np.where(reached, lam.values, np.nan),
            reached,
            loop_closure=loop,
            case=self.case,
            meta={"integrability": integrability_residual(forms), "provenance": forms.provenance},
        )
        immersion.lag_residual = lagrangian_field(immersion)
        logger.info(f"built {immersion} (loop closure {loop:.3e})")
        return immersion


class SurfaceCaseBuilder(CaseBuilder):
    """Cases whose first factor is a minimal surface with conformal factor ω, constant along t."""

    def __init__(self, omega: ScalarField2D, surface: SurfaceData | None = None) -> None:
        self._omega = omega
        self._surface = surface

    def surface(self, grid: Grid3D) -> SurfaceData:
        if self._surface is None:
            self._surface = SurfaceData.from_omega(self._omega, grid.surface)
        return self._surface

    def points(self, grid: Grid3D) -> np.ndarray:
        p = self.surface(grid).samples.p
        return np.broadcast_to(p, grid.shape + (4,)).copy()
