"""nkLag custom types."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Literal

import numpy as np

from .errors import DomainError
from .fd import derivative
from .quat import as_im, as_quat, qinner, qnorm

Provenance = Literal["analytic", "fd"]


@dataclass(frozen=True)
class Axis:
    start: float
    step: float
    count: int

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise DomainError(f"axis step must be positive, got {self.step}")
        if self.count < 1:
            raise DomainError(f"axis needs at least one point, got {self.count}")

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.start:g}..{self.stop:g}, n={self.count})"

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    @staticmethod
    def spanning(start: float, stop: float, count: int) -> Axis:
        return Axis(start, (stop - start) / (count - 1), count)


@dataclass(frozen=True)
class Grid2D:
    u: Axis
    v: Axis

    @property
    def shape(self) -> tuple[int, int]:
        return (self.u.count, self.v.count)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.u.values, self.v.values, indexing="ij")


@dataclass(frozen=True)
class Grid3D:
    t: Axis
    u: Axis
    v: Axis

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.t.count, self.u.count, self.v.count)

    @property
    def surface(self) -> Grid2D:
        return Grid2D(self.u, self.v)

    @property
    def steps(self) -> tuple[float, float, float]:
        return (self.t.step, self.u.step, self.v.step)

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(self.t.values, self.u.values, self.v.values, indexing="ij")


@dataclass
class ScalarField2D:
    """Samples values[i, j] at (u0 + i·hu, v0 + j·hv)."""

    values: np.ndarray
    u0: float
    v0: float
    hu: float
    hv: float
    du: np.ndarray | None = None
    dv: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or min(self.values.shape) < 3:
            raise DomainError(f"scalar fields need at least 3x3 samples, got {self.values.shape}")
        if self.hu <= 0 or self.hv <= 0:
            raise DomainError(f"grid spacing must be positive, got hu={self.hu}, hv={self.hv}")
        if (self.du is None) != (self.dv is None):
            raise DomainError("analytic derivatives come in pairs")

    def __str__(self) -> str:
        n_u, n_v = self.shape
        return f"{type(self).__name__}({n_u}x{n_v}, provenance={self.provenance})"

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def grid(self) -> Grid2D:
        n_u, n_v = self.shape
        return Grid2D(Axis(self.u0, self.hu, n_u), Axis(self.v0, self.hv, n_v))

    @property
    def provenance(self) -> Provenance:
        return "analytic" if self.du is not None else "fd"

    def derivatives(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (∂u, ∂v), analytic when available, finite differences otherwise."""
        if self.du is not None:
            return self.du, self.dv

        return derivative(self.values, self.hu, 0), derivative(self.values, self.hv, 1)

    @staticmethod
    def constant(grid: Grid2D, value: float = 0.0) -> ScalarField2D:
        zeros = np.zeros(grid.shape)
        return ScalarField2D(
            zeros + value, grid.u.start, grid.v.start, grid.u.step, grid.v.step, zeros, zeros.copy()
        )


@dataclass
class NKPoint:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        self.p = as_quat(self.p)
        self.q = as_quat(self.q)

    def check_unit(self, tol: float = 1e-12) -> None:
        drift = max(np.max(np.abs(qnorm(self.p) - 1.0)), np.max(np.abs(qnorm(self.q) - 1.0)))
        if drift > tol:
            raise DomainError(f"base point is not on S3xS3 (norm drift {drift:.3e})")


@dataclass(frozen=True)
class NKTangent:
    """Body-frame tangent (α|β) of Z = (pα, qβ)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_im(self.a))
        object.__setattr__(self, "b", as_im(self.b))

    def __add__(self, other: NKTangent) -> NKTangent:
        return NKTangent(self.a + other.a, self.b + other.b)

    def __sub__(self, other: NKTangent) -> NKTangent:
        return NKTangent(self.a - other.a, self.b - other.b)

    def __neg__(self) -> NKTangent:
        return NKTangent(-self.a, -self.b)

    def __mul__(self, scalar) -> NKTangent:
        scalar = np.asarray(scalar, dtype=np.float64)[..., None]
        return NKTangent(self.a * scalar, self.b * scalar)

    __rmul__ = __mul__

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.a, self.b], axis=-1)

    @staticmethod
    def from_array(arr) -> NKTangent:
        arr = np.asarray(arr, dtype=np.float64)
        return NKTangent(arr[..., :3], arr[..., 3:])

    @staticmethod
    def zero(shape: tuple = ()) -> NKTangent:
        return NKTangent(np.zeros(shape + (3,)), np.zeros(shape + (3,)))


@dataclass
class FrameSample:
    """Surface point, coordinate derivatives and unit normal, possibly over a grid."""

    p: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    N: np.ndarray
    grid: Grid2D | None = None
    loop_defect: float = 0.0

    def __post_init__(self) -> None:
        self.p = as_quat(self.p)
        self.du = as_quat(self.du)
        self.dv = as_quat(self.dv)
        self.N = as_quat(self.N)

    def at(self, i: int, j: int) -> FrameSample:
        return FrameSample(self.p[i, j], self.du[i, j], self.dv[i, j], self.N[i, j])

    def gauge_defects(self, omega) -> dict[str, float]:
        """Worst violations of the isothermal-gauge invariants."""
        scale = 2.0 * np.exp(np.asarray(omega, dtype=np.float64))
        frame = np.stack([self.p, self.du / np.sqrt(scale)[..., None], self.dv / np.sqrt(scale)[..., None], self.N], axis=-1)
        return {
            "tangency": float(np.max(np.abs([qinner(self.p, self.du), qinner(self.p, self.dv), qinner(self.p, self.N)]))),
            "conformal": float(
                np.max(
                    np.abs(
                        [
                            qinner(self.du, self.du) - scale,
                            qinner(self.dv, self.dv) - scale,
                            qinner(self.du, self.dv),
                        ]
                    )
                )
            ),
            "orientation": float(np.max(np.abs(np.linalg.det(frame) - 1.0))),
            "unit": float(np.max(np.abs(qnorm(self.p) - 1.0))),
        }


@dataclass
class ConnectionForms:
    """Right-logarithmic derivatives β₁, β₂, β₃ of q along (t, u, v)."""

    beta1: np.ndarray
    beta2: np.ndarray
    beta3: np.ndarray
    grid: Grid3D
    provenance: Provenance = "fd"
    mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.beta1 = as_im(self.beta1)
        self.beta2 = as_im(self.beta2)
        self.beta3 = as_im(self.beta3)
        if self.mask is None:
            self.mask = np.all(
                np.isfinite(np.stack([self.beta1, self.beta2, self.beta3])), axis=(0, -1)
            )

    def __str__(self) -> str:
        return f"{type(self).__name__}(shape={self.grid.shape}, provenance={self.provenance})"

    def along(self, axis: int) -> np.ndarray:
        return (self.beta1, self.beta2, self.beta3)[axis]


@dataclass
class LambdaField:
    values: np.ndarray
    branch: int = 1

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.branch not in (1, -1):
            raise DomainError(f"branch sign must be ±1, got {self.branch}")

    def admissible(self) -> np.ndarray:
        return np.isfinite(self.values) & (self.values > 0.0) & (self.values < np.pi / 2)


@dataclass
class CubicCoefficients:
    h13_3: np.ndarray
    h12_3: np.ndarray
    h22_3: np.ndarray
    h23_3: np.ndarray

    def tensor(self) -> np.ndarray:
        """Fully symmetric h[i, j, k] = h_ij^k, filled with the derived relations."""
        shape = np.shape(self.h13_3)
        h = np.zeros(shape + (3, 3, 3))
        values = {
            (0, 1, 2): self.h12_3,
            (0, 2, 2): self.h13_3,
            (0, 1, 1): -self.h13_3,
            (1, 1, 2): self.h22_3,
            (2, 2, 2): -self.h22_3,
            (1, 2, 2): self.h23_3,
            (1, 1, 1): -self.h23_3,
        }
        for index, value in values.items():
            for perm in set(permutations(index)):
                h[(...,) + perm] = value
        return h


@dataclass
class ImmersionGrid:
    """Sampled (t, u, v) ↦ (p, q) with per-site diagnostics."""

    grid: Grid3D
    p: np.ndarray
    q: np.ndarray
    lam: np.ndarray | None = None
    mask: np.ndarray | None = None
    lag_residual: np.ndarray | None = None
    loop_closure: float = 0.0
    case: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.p = as_quat(self.p)
        self.q = as_quat(self.q)
        shape = self.grid.shape
        if self.p.shape != shape + (4,) or self.q.shape != shape + (4,):
            raise DomainError(f"p, q must have shape {shape + (4,)}")
        if self.lam is None:
            self.lam = np.full(shape, np.nan)
        if self.mask is None:
            self.mask = np.all(np.isfinite(self.p), axis=-1) & np.all(np.isfinite(self.q), axis=-1)
        if self.lag_residual is None:
            self.lag_residual = np.full(shape, np.nan)

    def __str__(self) -> str:
        return f"{type(self).__name__}(case={self.case}, shape={self.grid.shape}, masked={self.masked_count})"

    @property
    def masked_count(self) -> int:
        return int(np.size(self.mask) - np.count_nonzero(self.mask))

    def unit_drift(self) -> float:
        ok = self.mask
        if not np.any(ok):
            return float("nan")
        return float(max(np.max(np.abs(qnorm(self.p[ok]) - 1.0)), np.max(np.abs(qnorm(self.q[ok]) - 1.0))))
