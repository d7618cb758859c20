"""Define the `ImmersionSource` interface."""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from ..core.types import NKPoint


@dataclass
class Jets:
    """Base points and ambient derivatives of (p, q) at S sites.

    dp[s, a] is ∂ₐp and ddp[s, a, b] is ∂ₐ∂ᵦp in the parameter order of the
    source; the same holds for q.
    """

    p: np.ndarray
    q: np.ndarray
    dp: np.ndarray
    dq: np.ndarray
    ddp: np.ndarray
    ddq: np.ndarray
    params: np.ndarray
    lam: np.ndarray | None = None

    def __str__(self) -> str:
        return f"{type(self).__name__}(sites={len(self)})"

    def __len__(self) -> int:
        return int(self.p.shape[0])

    @property
    def base(self) -> NKPoint:
        return NKPoint(self.p, self.q)

    def select(self, keep: np.ndarray) -> Jets:
        lam = None if self.lam is None else self.lam[keep]
        return Jets(
            self.p[keep], self.q[keep], self.dp[keep], self.dq[keep],
            self.ddp[keep], self.ddq[keep], self.params[keep], lam,
        )


class ClosedFormImmersion(abc.ABC):
    """A map of three parameters into S³×S³ given by formulas."""

    name: str = "closed-form"
    #: parameter triples the verifier samples when none are given
    sample_sites: tuple[tuple[float, float, float], ...] = ()

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.name})"

    @abc.abstractmethod
    def point(self, x1, x2, x3) -> tuple[np.ndarray, np.ndarray]:
        """Return (p, q), broadcasting over the parameters."""

    def tangents(self, x1, x2, x3) -> tuple[np.ndarray, np.ndarray] | None:
        """Return (dp, dq) of shape (..., 3, 4), or None to differentiate numerically."""
        return None


class ImmersionSource(abc.ABC):
    """Interface for immersions the verifier can differentiate."""

    #: "analytic" or "fd(<step>)", recorded on every tangent frame
    provenance: str

    @abc.abstractmethod
    def sites(self) -> np.ndarray:
        """Return the default sample sites, in the form `jets` accepts."""

    @abc.abstractmethod
    def jets(self, sites: np.ndarray) -> Jets:
        """Return base points with first and second ambient derivatives."""

    @abc.abstractmethod
    def unit_drift(self) -> float:
        """Return the worst | |p| − 1 | or | |q| − 1 | over the source."""

    def loop_closure(self) -> float | None:
        """Return the integration loop defect, None when the source was not integrated."""
        return None
