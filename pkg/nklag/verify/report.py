"""Certification of an immersion against the fixed list of checks."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

from ..core.fd import derivative, interior_sup
from ..core.structure import SQRT3
from ..core.types import ImmersionGrid
from .angles import AngleReport, angle_functions, dp_length_squared, rank_p_check
from .cubic import cubic_asymmetry, cubic_form, cubic_trace, lift_frame_check, surface_second_form, xi_alignment
from .sources import EDGE_MARGIN, GridSource, as_source
from .tangents import DEFAULT_FD_STEP, frame_from_jets, lagrangian_values

logger = logging.getLogger("nklag")

REPORT_NAMES = (
    "max_lagrangian_residual",
    "max_unit_drift",
    "theta1_deviation",
    "angle_sum_deviation",
    "mean_curvature_p",
    "cubic_trace_residual",
    "loop_closure",
    "xi_normal_alignment",
)

THRESHOLDS = {
    "max_lagrangian_residual": 1e-6,
    "max_unit_drift": 1e-10,
    "theta1_deviation": 1e-6,
    "angle_sum_deviation": 1e-6,
    "mean_curvature_p": 1e-6,
    "cubic_trace_residual": 1e-4,
    "loop_closure": 1e-6,
    "xi_normal_alignment": 1e-6,
}

# Relations reported beside the fixed names; they fail the report like the named checks.
EXTRA_THRESHOLDS = {
    "dp_e2_length": 1e-6,
    "dp_e3_length": 1e-6,
    "lambda_deviation": 1e-5,
    "h11": 1e-4,
    "sigma_relation": 1e-4,
    "e1_lambda": 1e-4,
    "e2_lambda": 1e-4,
    "e3_lambda": 1e-4,
}

# Above this Lagrangian residual the angle decomposition is meaningless.
ANGLE_GATE = 1e-3


@dataclass
class VerifyReport:
    """Check values by name; None marks a check that does not apply."""

    values: dict[str, float | None]
    thresholds: dict[str, float] = field(default_factory=lambda: dict(THRESHOLDS))
    extras: dict[str, float | None] = field(default_factory=dict)
    sites: int = 0

    def __str__(self) -> str:
        state = "pass" if self.passed() else f"fail({', '.join(self.failures())})"
        return f"{type(self).__name__}(sites={self.sites}, {state})"

    def gated_extras(self) -> dict[str, float]:
        """Thresholds of the extras that take part in pass/fail."""
        return {name: self.thresholds.get(name, limit) for name, limit in EXTRA_THRESHOLDS.items()}

    def failures(self) -> list[str]:
        checks = [(name, self.values.get(name), self.thresholds[name]) for name in REPORT_NAMES]
        checks += [(name, self.extras.get(name), limit) for name, limit in self.gated_extras().items()]
        return [
            name
            for name, value, limit in checks
            if value is not None and not (np.isfinite(value) and value < limit)
        ]

    def passed(self) -> bool:
        return not self.failures()

    def lines(self) -> list[str]:
        return [
            f"{name}={'skipped' if self.values.get(name) is None else format(self.values[name], '.17g')}"
            for name in REPORT_NAMES
        ]


def _sup_or_skip(values: np.ndarray) -> float | None:
    values = np.asarray(values, dtype=np.float64)
    return interior_sup(values) if np.any(np.isfinite(values)) else None


def relations_check(
    immersion: ImmersionGrid, sites: np.ndarray, report: AngleReport, h: np.ndarray
) -> dict[str, float | None]:
    """Eᵢ(Λ) against the cubic form, with Λ taken from the grid and differentiated along its axes."""
    steps = immersion.grid.steps
    gradient = np.stack([derivative(immersion.lam, steps[a], a) for a in range(3)], axis=-1)[tuple(sites.T)]
    along = np.einsum("sia,sa->si", report.coeff, gradient)
    return {
        "e1_lambda": _sup_or_skip(along[:, 0] - h[:, 0, 2, 2]),
        "e2_lambda": _sup_or_skip(along[:, 1] - h[:, 1, 2, 2]),
        "e3_lambda": _sup_or_skip(along[:, 2] + h[:, 1, 1, 2]),
        "lambda_deviation": _sup_or_skip(immersion.lam[tuple(sites.T)] - report.lam),
    }


def certify(
    f, fd_step: float = DEFAULT_FD_STEP, thresholds: dict | None = None, sites=None, margin: int = EDGE_MARGIN
) -> VerifyReport:
    """Run every check over the sample sites of an immersion grid or a closed-form map.

    Grid sites closer than `margin` samples to a face are left out.
    """
    source = as_source(f, fd_step, margin)
    sites = source.sites() if sites is None else np.asarray(sites)
    triple = frame_from_jets(source.jets(sites), source.provenance)
    values: dict[str, float | None] = dict.fromkeys(REPORT_NAMES)
    extras: dict[str, float | None] = {"tangency_defect": _sup_or_skip(triple.defect)}

    lagrangian = interior_sup(lagrangian_values(triple))
    values["max_lagrangian_residual"] = lagrangian
    values["max_unit_drift"] = source.unit_drift()
    values["loop_closure"] = source.loop_closure()

    if lagrangian > ANGLE_GATE:
        logger.warning(f"Lagrangian residual {lagrangian:.3e} exceeds {ANGLE_GATE:g}; skipping angle checks")
    else:
        report = angle_functions(triple)
        values["theta1_deviation"] = _sup_or_skip(report.theta1_deviation())
        values["angle_sum_deviation"] = _sup_or_skip(report.sum_deviation())

        h = cubic_form(triple, report)
        values["cubic_trace_residual"] = _sup_or_skip(cubic_trace(h))
        second = surface_second_form(triple, report)
        values["mean_curvature_p"] = _sup_or_skip(second.mean_curvature)
        values["xi_normal_alignment"] = _sup_or_skip(xi_alignment(report))

        sin2 = np.sin(report.lam) ** 2
        h13, h12 = h[:, 0, 2, 2], h[:, 0, 1, 2]
        lift_defect, _ = lift_frame_check(triple, report)
        extras |= {
            "operator_asymmetry": _sup_or_skip(report.asymmetry),
            "cubic_asymmetry": _sup_or_skip(cubic_asymmetry(h)),
            "rank_p": _sup_or_skip(rank_p_check(report)),
            "dp_e2_length": _sup_or_skip(dp_length_squared(report, 1) - sin2),
            "dp_e3_length": _sup_or_skip(dp_length_squared(report, 2) - sin2),
            "h11": _sup_or_skip(np.maximum(np.abs(h[:, 0, 0, 1]), np.abs(h[:, 0, 0, 2]))),
            "sigma_relation": _sup_or_skip(
                np.maximum.reduce([
                    np.abs(second.sigma[:, 1, 1] - h13),
                    np.abs(second.sigma[:, 1, 2] - (np.cos(report.lam) * np.sin(report.lam) / SQRT3 - h12)),
                    np.abs(second.sigma[:, 2, 2] + h13),
                ])
            ),
            "lift_frame": _sup_or_skip(np.where(np.sin(report.lam) > 1e-6, lift_defect, np.nan)),
        }
        if isinstance(source, GridSource) and np.any(np.isfinite(source.immersion.lam)):
            extras |= relations_check(source.immersion, sites, report, h)

    result = VerifyReport(values, {**THRESHOLDS, **(thresholds or {})}, extras, len(triple))
    for name in REPORT_NAMES:
        if values[name] is None:
            logger.warning(f"check {name} skipped")
    logger.info(f"{result}")
    return result
