"""Angle functions of a Lagrangian tangent frame.

On a Lagrangian tangent space PTᵢ = Σⱼ AⱼᵢTⱼ + J(Σⱼ BⱼᵢTⱼ) with A, B symmetric
and commuting. Their common eigendirections Eᵢ satisfy
PEᵢ = cos(2θᵢ)Eᵢ + sin(2θᵢ)JEᵢ.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from ..core.errors import StructureViolationError
from ..core.structure import g_metric, g_tensor, j_apply, p_apply
from ..core.types import NKTangent
from .tangents import TangentTriple

logger = logging.getLogger("nklag")

COMMUTATOR_TOLERANCE = 1e-6
CLUSTER_TOLERANCE = 1e-4
TWO_PI_THIRDS = 2.0 * np.pi / 3.0


def wrap(angle) -> np.ndarray:
    """Reduce into (−π, π]."""
    return np.pi - np.mod(np.pi - np.asarray(angle), 2.0 * np.pi)


@dataclass
class AngleReport:
    """Per-site 2θ for the labelled directions E₁, E₂, E₃.

    `frame` holds Eᵢ in body form and `coeff[s, i]` their coordinates in the
    parameter basis. E₁ spans the kernel of dp, and E₂ is the direction with
    2θ₂ = 2Λ + 2π/3.
    """

    two_theta: np.ndarray
    frame: NKTangent
    coeff: np.ndarray
    lam: np.ndarray
    asymmetry: np.ndarray
    commutator: np.ndarray
    alignment: np.ndarray

    def __str__(self) -> str:
        return f"{type(self).__name__}(sites={len(self.lam)})"

    def vector(self, i: int) -> NKTangent:
        return NKTangent(self.frame.a[:, i], self.frame.b[:, i])

    def theta1_deviation(self) -> np.ndarray:
        return np.abs(wrap(self.two_theta[:, 0] - TWO_PI_THIRDS)) / 2.0

    def sum_deviation(self) -> np.ndarray:
        return np.abs(wrap(np.sum(self.two_theta, axis=-1)))


def structure_operators(triple: TangentTriple) -> tuple[np.ndarray, np.ndarray]:
    """Solve PTᵢ = Σ AⱼᵢTⱼ + Σ BⱼᵢJTⱼ in the basis {Tⱼ, JTⱼ}."""
    frame = triple.frame
    basis = np.concatenate([frame.as_array(), j_apply(frame).as_array()], axis=-2)
    target = p_apply(frame).as_array()
    finite = np.all(np.isfinite(basis), axis=(-2, -1))
    solution = np.full(basis.shape[:-2] + (6, 3), np.nan)
    if np.any(finite):
        solution[finite] = np.linalg.solve(
            np.swapaxes(basis[finite], -1, -2), np.swapaxes(target[finite], -1, -2)
        )
    return solution[..., :3, :], solution[..., 3:, :]


def _joint_eigenvectors(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Eigenvectors of A, refined by B inside clusters of equal A-eigenvalues."""
    values, vectors = np.linalg.eigh(a)
    start = 0
    for k in range(1, 4):
        if k == 3 or values[k] - values[k - 1] > CLUSTER_TOLERANCE:
            if k - start > 1:
                block = vectors[:, start:k]
                _, inner = np.linalg.eigh(block.T @ b @ block)
                vectors[:, start:k] = block @ inner
            start = k
    return vectors


def _label(two_theta: np.ndarray, dp_length: np.ndarray) -> list[int]:
    first = int(np.argmin(dp_length))
    rest = [i for i in range(3) if i != first]
    offsets = [wrap(two_theta[i] - TWO_PI_THIRDS) for i in rest]
    if offsets[1] > offsets[0]:
        rest.reverse()
    return [first] + rest


def angle_functions(triple: TangentTriple) -> AngleReport:
    """2θ at every site with finite frames; other sites are NaN."""
    a_all, b_all = structure_operators(triple)
    n = len(triple)
    two_theta = np.full((n, 3), np.nan)
    lam = np.full(n, np.nan)
    asymmetry = np.full(n, np.nan)
    commutator = np.full(n, np.nan)
    alignment = np.full(n, np.nan)
    coeff = np.full((n, 3, 3), np.nan)
    body = np.full((n, 3, 6), np.nan)
    frame = triple.frame.as_array()

    for s in range(n):
        a, b = a_all[s], b_all[s]
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            continue
        asymmetry[s] = max(np.max(np.abs(a - a.T)), np.max(np.abs(b - b.T)))
        a, b = 0.5 * (a + a.T), 0.5 * (b + b.T)
        commutator[s] = np.linalg.norm(a @ b - b @ a)
        if commutator[s] > COMMUTATOR_TOLERANCE:
            raise StructureViolationError(float(commutator[s]), tuple(float(x) for x in triple.jets.params[s]))

        vectors = _joint_eigenvectors(a, b)
        diag_a, diag_b = vectors.T @ a @ vectors, vectors.T @ b @ vectors
        alignment[s] = max(
            np.max(np.abs(diag_a - np.diag(np.diag(diag_a)))), np.max(np.abs(diag_b - np.diag(np.diag(diag_b))))
        )
        angles = np.mod(np.arctan2(np.diag(diag_b), np.diag(diag_a)), 2.0 * np.pi)
        directions = vectors.T @ frame[s]
        order = _label(angles, np.linalg.norm(directions[:, :3], axis=-1))

        directions = directions[order]
        rows = vectors.T[order] @ triple.coeff[s]
        lead = np.flatnonzero(np.abs(rows[0]) > 1e-8 * np.max(np.abs(rows[0])))
        if lead.size and rows[0, lead[0]] < 0:
            directions[0], rows[0] = -directions[0], -rows[0]
        e = [NKTangent.from_array(d) for d in directions]
        if g_metric(j_apply(g_tensor(e[0], e[1])), e[2]) < 0:
            directions[2], rows[2] = -directions[2], -rows[2]

        two_theta[s] = angles[order]
        lam[s] = wrap(angles[order[1]] - TWO_PI_THIRDS) / 2.0
        body[s], coeff[s] = directions, rows

    logger.debug(f"extracted angle functions at {n} sites")
    return AngleReport(two_theta, NKTangent.from_array(body), coeff, lam, asymmetry, commutator, alignment)


def rank_p_check(report: AngleReport) -> np.ndarray:
    """|dp(E₁)| per site, Euclidean; zero when E₁ spans the kernel of dp."""
    return np.linalg.norm(report.frame.a[:, 0], axis=-1)


def dp_length_squared(report: AngleReport, i: int) -> np.ndarray:
    """⟨dp(Eᵢ), dp(Eᵢ)⟩, which equals sin²Λ for i = 2, 3."""
    return np.sum(report.frame.a[:, i] ** 2, axis=-1)
