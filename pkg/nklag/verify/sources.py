"""Sampled and closed-form immersions as inputs to the verifier."""

from __future__ import annotations

import logging

import numpy as np

from ..core.errors import DomainError
from ..core.fd import derivative, second_derivative
from ..core.quat import qnorm
from ..core.types import ImmersionGrid
from .base import ClosedFormImmersion, ImmersionSource, Jets

logger = logging.getLogger("nklag")

FD_STEP_RANGE = (1e-6, 1e-2)
SECOND_STEP = 1e-3


EDGE_MARGIN = 2


def _interior(n: int, margin: int) -> slice:
    return slice(margin, n - margin) if n > 2 * margin else slice(1, n - 1)


class GridSource(ImmersionSource):
    """Finite differences of an `ImmersionGrid` along its (t, u, v) axes.

    Interior sites stay `margin` samples away from every face of the grid.
    """

    def __init__(self, immersion: ImmersionGrid, margin: int = EDGE_MARGIN) -> None:
        if margin < 0:
            raise DomainError(f"edge margin must be non-negative, got {margin}")
        if min(immersion.grid.shape) < 3:
            raise DomainError(f"need at least 3 samples per axis to differentiate, got {immersion.grid.shape}")
        self.immersion = immersion
        self.margin = margin
        self.provenance = f"fd({max(immersion.grid.steps):g})"
        self._derivatives: tuple[np.ndarray, ...] | None = None

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.immersion})"

    def derivatives(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Full-grid (dp, dq, ddp, ddq), computed once."""
        if self._derivatives is None:
            steps = self.immersion.grid.steps
            out = []
            for f in (self.immersion.p, self.immersion.q):
                first = [derivative(f, steps[a], a) for a in range(3)]
                second = [[None] * 3 for _ in range(3)]
                for a in range(3):
                    second[a][a] = second_derivative(f, steps[a], a)
                    for b in range(a + 1, 3):
                        second[a][b] = second[b][a] = derivative(first[a], steps[b], b)
                out.append((np.stack(first, axis=-2), np.stack([np.stack(row, axis=-2) for row in second], axis=-3)))
            (dp, ddp), (dq, ddq) = out
            self._derivatives = (dp, dq, ddp, ddq)
            logger.debug(f"differentiated {self.immersion} along all axes")
        return self._derivatives

    def sites(self, interior: bool = True) -> np.ndarray:
        """Index triples of unmasked sites, away from the edges when `interior`."""
        keep = self.immersion.mask.copy()
        if interior:
            window = np.zeros_like(keep)
            window[tuple(_interior(n, self.margin) for n in keep.shape)] = True
            keep &= window
        return np.argwhere(keep)

    def jets(self, sites: np.ndarray) -> Jets:
        sites = np.asarray(sites, dtype=int).reshape(-1, 3)
        index = tuple(sites.T)
        dp, dq, ddp, ddq = self.derivatives()
        grid = self.immersion.grid
        params = np.stack([axis.values[i] for axis, i in zip((grid.t, grid.u, grid.v), index)], axis=-1)
        return Jets(
            self.immersion.p[index], self.immersion.q[index],
            dp[index], dq[index], ddp[index], ddq[index],
            params, self.immersion.lam[index],
        )

    def unit_drift(self) -> float:
        return self.immersion.unit_drift()

    def loop_closure(self) -> float | None:
        loop = self.immersion.loop_closure
        return float(loop) if np.isfinite(loop) else None


class MapSource(ImmersionSource):
    """Centered differences of a closed-form map around each sample site.

    First derivatives use `h_fd` unless the map provides analytic tangents;
    second derivatives use max(h_fd, 1e−3) so that round-off stays small.
    """

    def __init__(self, immersion: ClosedFormImmersion, h_fd: float = 1e-4) -> None:
        low, high = FD_STEP_RANGE
        if not low <= h_fd <= high:
            raise DomainError(f"fd step must lie in [{low:g}, {high:g}], got {h_fd:g}")
        self.immersion = immersion
        self.h_fd = h_fd
        sample = immersion.tangents(*np.zeros((3, 1)))
        self.provenance = "analytic" if sample is not None else f"fd({h_fd:g})"

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.immersion}, provenance={self.provenance})"

    def sites(self) -> np.ndarray:
        if not self.immersion.sample_sites:
            raise DomainError(f"{self.immersion} has no sample sites")
        return np.asarray(self.immersion.sample_sites, dtype=np.float64)

    def _at(self, x: np.ndarray) -> np.ndarray:
        p, q = self.immersion.point(x[..., 0], x[..., 1], x[..., 2])
        return np.concatenate([p, q], axis=-1)

    def jets(self, sites: np.ndarray) -> Jets:
        x = np.asarray(sites, dtype=np.float64).reshape(-1, 3)
        unit = np.eye(3)
        base = self._at(x)

        analytic = self.immersion.tangents(x[:, 0], x[:, 1], x[:, 2])
        if analytic is not None:
            first = np.concatenate(analytic, axis=-1)
        else:
            h = self.h_fd
            first = np.stack(
                [(self._at(x + h * unit[a]) - self._at(x - h * unit[a])) / (2.0 * h) for a in range(3)], axis=-2
            )

        h = max(self.h_fd, SECOND_STEP)
        second = np.empty(x.shape[:1] + (3, 3, 8))
        for a in range(3):
            second[:, a, a] = (self._at(x + h * unit[a]) - 2.0 * base + self._at(x - h * unit[a])) / h**2
            for b in range(a + 1, 3):
                mixed = (
                    self._at(x + h * (unit[a] + unit[b]))
                    - self._at(x + h * (unit[a] - unit[b]))
                    - self._at(x - h * (unit[a] - unit[b]))
                    + self._at(x - h * (unit[a] + unit[b]))
                ) / (4.0 * h**2)
                second[:, a, b] = second[:, b, a] = mixed

        return Jets(
            base[:, :4], base[:, 4:], first[..., :4], first[..., 4:], second[..., :4], second[..., 4:], x
        )

    def unit_drift(self) -> float:
        values = self._at(self.sites())
        return float(max(np.max(np.abs(qnorm(values[:, :4]) - 1.0)), np.max(np.abs(qnorm(values[:, 4:]) - 1.0))))


def as_source(f, h_fd: float = 1e-4, margin: int = EDGE_MARGIN) -> ImmersionSource:
    match f:
        case ImmersionSource():
            return f
        case ImmersionGrid():
            return GridSource(f, margin)
        case ClosedFormImmersion():
            return MapSource(f, h_fd)
    raise DomainError(f"cannot verify an object of type {type(f).__name__}")
