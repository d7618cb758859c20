"""Body-frame tangent frames and the Lagrangian residual."""

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from ..core.errors import FrameQualityError
from ..core.fd import interior_sup
from ..core.structure import g_metric, g_norm, omega_form, pullback
from ..core.types import ImmersionGrid, NKPoint, NKTangent
from .base import Jets
from .sources import GridSource, as_source

logger = logging.getLogger("nklag")

FRAME_QUALITY = 1e-3
DEGENERATE = 1e-12
DEFAULT_FD_STEP = 1e-4


@dataclass
class TangentTriple:
    """Coordinate tangents F and a g-orthonormal frame T = coeff·F at every site."""

    jets: Jets
    coordinate: NKTangent
    frame: NKTangent
    coeff: np.ndarray
    defect: np.ndarray
    provenance: str

    def __str__(self) -> str:
        return f"{type(self).__name__}(sites={len(self)}, provenance={self.provenance})"

    def __len__(self) -> int:
        return len(self.jets)

    @property
    def base(self) -> NKPoint:
        return self.jets.base

    def vector(self, i: int) -> NKTangent:
        return NKTangent(self.frame.a[:, i], self.frame.b[:, i])

    def gram(self) -> np.ndarray:
        """g(Tᵢ, Tⱼ) per site."""
        left = NKTangent(self.frame.a[:, :, None], self.frame.b[:, :, None])
        right = NKTangent(self.frame.a[:, None, :], self.frame.b[:, None, :])
        return g_metric(left, right)


def gram_schmidt(coordinate: NKTangent) -> tuple[NKTangent, np.ndarray]:
    """Orthonormalise F₁, F₂, F₃ in g, tracking T = S·F; degenerate sites become NaN."""
    vectors = coordinate.as_array().copy()
    coeff = np.broadcast_to(np.eye(3), vectors.shape[:-2] + (3, 3)).copy()
    for i in range(3):
        for j in range(i):
            c = g_metric(NKTangent.from_array(vectors[..., i, :]), NKTangent.from_array(vectors[..., j, :]))
            vectors[..., i, :] -= c[..., None] * vectors[..., j, :]
            coeff[..., i, :] -= c[..., None] * coeff[..., j, :]
        norm = g_norm(NKTangent.from_array(vectors[..., i, :]))
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(norm > DEGENERATE, 1.0 / norm, np.nan)
        vectors[..., i, :] *= scale[..., None]
        coeff[..., i, :] *= scale[..., None]
    return NKTangent.from_array(vectors), coeff


def frame_from_jets(jets: Jets, provenance: str, check: bool = True) -> TangentTriple:
    at = NKPoint(jets.p[:, None, :], jets.q[:, None, :])
    coordinate, defect = pullback(at, jets.dp, jets.dq)
    defect = np.max(defect, axis=-1)
    if check and np.any(defect > FRAME_QUALITY):
        worst = int(np.nanargmax(defect))
        raise FrameQualityError(float(defect[worst]), tuple(float(x) for x in jets.params[worst]))
    frame, coeff = gram_schmidt(coordinate)
    return TangentTriple(jets, coordinate, frame, coeff, defect, provenance)


def tangent_frame(f, sites=None, h_fd: float = DEFAULT_FD_STEP, check: bool = True) -> TangentTriple:
    """Tangent frames of an immersion grid, a closed-form map or any `ImmersionSource`."""
    source = as_source(f, h_fd)
    jets = source.jets(source.sites() if sites is None else np.asarray(sites))
    triple = frame_from_jets(jets, source.provenance, check)
    logger.debug(f"{triple}: worst tangency defect {interior_sup(triple.defect):.3e}")
    return triple


def lagrangian_values(triple: TangentTriple) -> np.ndarray:
    """max over i < j of |g(JTᵢ, Tⱼ)| per site."""
    pairs = [(0, 1), (0, 2), (1, 2)]
    return np.max(
        np.abs(np.stack([omega_form(triple.vector(i), triple.vector(j)) for i, j in pairs], axis=-1)), axis=-1
    )


def lagrangian_residual(f, sites=None, h_fd: float = DEFAULT_FD_STEP) -> float:
    return interior_sup(lagrangian_values(tangent_frame(f, sites, h_fd)))


def lagrangian_field(immersion: ImmersionGrid) -> np.ndarray:
    """Per-site Lagrangian residual over the whole grid; NaN where it cannot be measured."""
    source = GridSource(immersion)
    sites = source.sites(interior=False)
    out = np.full(immersion.grid.shape, np.nan)
    if len(sites):
        triple = frame_from_jets(source.jets(sites), source.provenance, check=False)
        out[tuple(sites.T)] = lagrangian_values(triple)
    return out
