import numpy as np

from ..core.errors import DomainError
from ..core.structure import SQRT3
from ..core.types import Grid3D, ImmersionGrid
from .base import CaseBuilder, SurfaceCaseBuilder, SurfaceData
from .case1 import (
    Case1Builder,
    codazzi_mu_laplacian,
    cubic_coefficients,
    forms_case1,
    frame_relation,
    immersion_margin,
    lambda_case1,
    lambda_case1_field,
    lambda_derivatives,
)
from .case2 import Case2Builder, chart, chart_tangents, chart_to_frame, closed_form_q, forms_case2, frame_to_chart, lambda_case2
from .case3 import Case3Builder, e_frame, forms_case3, lambda_case3
from .integrate import integrability_fields, integrability_residual, integrate_q

BUILDERS: dict[int, type[CaseBuilder]] = {1: Case1Builder, 2: Case2Builder, 3: Case3Builder}


def builder_for(case: int, **inputs) -> CaseBuilder:
    if case not in BUILDERS:
        raise DomainError(f"case must be 1, 2 or 3, got {case!r}")
    try:
        return BUILDERS[case](**inputs)
    except TypeError as e:
        raise DomainError(f"bad inputs for case {case}: {e}") from e


def build(case: int, inputs: dict, grid: Grid3D, q0=None) -> ImmersionGrid:
    """Run the reverse construction `case` on `grid`."""
    return builder_for(case, **inputs).build(grid, q0)


def classify_case(h13_3, h12_3, lam, tol: float = 1e-8) -> int:
    """Which reverse construction applies to the given cubic-form data.

    2 when the surface is totally geodesic (h³₁₃ = 0 and h³₁₂ = cosΛ sinΛ/√3),
    otherwise 3 when 1/√3 + h³₁₂ csc 2Λ = 0, otherwise 1.
    """
    h13_3, h12_3, lam = (np.asarray(x, dtype=np.float64) for x in (h13_3, h12_3, lam))
    if np.all(np.abs(h13_3) < tol) and np.all(np.abs(h12_3 - np.cos(lam) * np.sin(lam) / SQRT3) < tol):
        return 2
    if np.all(np.abs(1.0 / SQRT3 + h12_3 / np.sin(2.0 * lam)) < tol):
        return 3
    return 1


__all__ = [
    "BUILDERS",
    "Case1Builder",
    "Case2Builder",
    "Case3Builder",
    "CaseBuilder",
    "SurfaceCaseBuilder",
    "SurfaceData",
    "build",
    "builder_for",
    "chart",
    "chart_tangents",
    "chart_to_frame",
    "classify_case",
    "closed_form_q",
    "codazzi_mu_laplacian",
    "cubic_coefficients",
    "e_frame",
    "forms_case1",
    "forms_case2",
    "forms_case3",
    "frame_relation",
    "frame_to_chart",
    "immersion_margin",
    "integrability_fields",
    "integrability_residual",
    "integrate_q",
    "lambda_case1",
    "lambda_case1_field",
    "lambda_case2",
    "lambda_case3",
    "lambda_derivatives",
]
