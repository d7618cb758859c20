"""Second-order diagnostics: the cubic form and the geometry of p(M) ⊂ S³."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.quat import embed_im, qinner, qmul
from ..core.structure import SQRT3, euclid_correction, g_metric, j_apply, pullback
from ..core.types import NKPoint, NKTangent
from .angles import AngleReport
from .tangents import TangentTriple

FLAT = 1e-10


def _pairwise(t: NKTangent) -> tuple[NKTangent, NKTangent]:
    return NKTangent(t.a[:, :, None], t.b[:, :, None]), NKTangent(t.a[:, None, :], t.b[:, None, :])


def cubic_form(triple: TangentTriple, report: AngleReport) -> np.ndarray:
    """h[s, i, j, k] = g(h(Eᵢ, Eⱼ), JEₖ) from ambient second derivatives."""
    jets = triple.jets
    at = NKPoint(jets.p[:, None, None, :], jets.q[:, None, None, :])
    second, _ = pullback(at, jets.ddp, jets.ddq)
    left, right = _pairwise(triple.coordinate)
    nabla = second - euclid_correction(left, right)

    normals = j_apply(report.frame)
    coordinate = g_metric(
        NKTangent(nabla.a[:, :, :, None], nabla.b[:, :, :, None]),
        NKTangent(normals.a[:, None, None, :], normals.b[:, None, None, :]),
    )
    c = report.coeff
    return np.einsum("sia,sjb,sabk->sijk", c, c, coordinate)


def cubic_trace(h: np.ndarray) -> np.ndarray:
    """max over k of |Σᵢ h_ii^k| per site; zero on minimal submanifolds."""
    return np.max(np.abs(np.einsum("siik->sk", h)), axis=-1)


def cubic_asymmetry(h: np.ndarray) -> np.ndarray:
    return np.max(np.abs(h - np.swapaxes(h, -1, -2)).reshape(len(h), -1), axis=-1)


@dataclass
class SurfaceSecondForm:
    """σ(Eᵢ, Eⱼ) of p(M) along the p-image of ξ, and the mean curvature along (E₂, E₃)."""

    sigma: np.ndarray
    mean_curvature: np.ndarray
    flat: np.ndarray


def xi_vector(report: AngleReport) -> NKTangent:
    """ξ = E₁/√3 − JE₁."""
    e1 = report.vector(0)
    return e1 * (1.0 / SQRT3) - j_apply(e1)


def _surface_normal(report: AngleReport) -> tuple[np.ndarray, np.ndarray]:
    normal = np.cross(report.frame.a[:, 1], report.frame.a[:, 2])
    length = np.linalg.norm(normal, axis=-1)
    flat = length < FLAT
    return normal / np.where(flat, 1.0, length)[:, None], flat


def surface_second_form(triple: TangentTriple, report: AngleReport) -> SurfaceSecondForm:
    """Second fundamental form of the surface swept by p; NaN where dp has rank < 2."""
    jets = triple.jets
    c = report.coeff
    normal, flat = _surface_normal(report)

    xi_a = xi_vector(report).a
    xi_length = np.linalg.norm(xi_a, axis=-1)
    along_xi = qmul(jets.p, embed_im(xi_a / np.where(xi_length > FLAT, xi_length, 1.0)[:, None]))
    coordinate = qinner(jets.ddp, along_xi[:, None, None, :])
    sigma = np.einsum("sia,sjb,sab->sij", c, c, coordinate)

    along_normal = qmul(jets.p, embed_im(normal))
    tangential = np.einsum("sia,sjb,sab->sij", c[:, 1:], c[:, 1:], qinner(jets.ddp, along_normal[:, None, None, :]))
    a = report.frame.a[:, 1:]
    metric = np.einsum("six,sjx->sij", a, a)
    mean = np.full(len(c), np.nan)
    ok = ~flat & np.all(np.isfinite(metric), axis=(-2, -1))
    if np.any(ok):
        mean[ok] = 0.5 * np.trace(np.linalg.solve(metric[ok], tangential[ok]), axis1=-2, axis2=-1)
    sigma[flat] = np.nan
    return SurfaceSecondForm(sigma, mean, flat)


def xi_alignment(report: AngleReport) -> np.ndarray:
    """How far ξ is from (±N, 0) with N the normal of p(M); NaN where p(M) degenerates."""
    xi = xi_vector(report)
    normal, flat = _surface_normal(report)
    total = np.linalg.norm(xi.as_array(), axis=-1)
    xi_a = xi.a / np.maximum(np.linalg.norm(xi.a, axis=-1), FLAT)[:, None]
    score = np.maximum(
        np.linalg.norm(xi.b, axis=-1) / total,
        np.linalg.norm(np.cross(xi_a, normal), axis=-1),
    )
    return np.where(flat, np.nan, score)


def lift_frame_check(triple: TangentTriple, report: AngleReport) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonality defect and determinant of (p, dp(E₂)/sinΛ, dp(E₃)/sinΛ, pξ)."""
    p = triple.jets.p
    sin_lam = np.sin(report.lam)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        columns = [
            p,
            qmul(p, embed_im(report.frame.a[:, 1])) / sin_lam,
            qmul(p, embed_im(report.frame.a[:, 2])) / sin_lam,
            qmul(p, embed_im(xi_vector(report).a)),
        ]
    matrix = np.stack(columns, axis=-1)
    defect = np.max(np.abs(np.swapaxes(matrix, -1, -2) @ matrix - np.eye(4)).reshape(len(p), -1), axis=-1)
    return defect, np.linalg.det(matrix)
