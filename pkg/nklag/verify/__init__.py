from .angles import AngleReport, angle_functions, dp_length_squared, rank_p_check, structure_operators, wrap
from .base import ClosedFormImmersion, ImmersionSource, Jets
from .cubic import (
    SurfaceSecondForm,
    cubic_form,
    cubic_trace,
    lift_frame_check,
    surface_second_form,
    xi_alignment,
    xi_vector,
)
from .report import EXTRA_THRESHOLDS, REPORT_NAMES, THRESHOLDS, VerifyReport, certify, relations_check
from .sources import EDGE_MARGIN, GridSource, MapSource, as_source
from .tangents import (
    TangentTriple,
    frame_from_jets,
    gram_schmidt,
    lagrangian_field,
    lagrangian_residual,
    lagrangian_values,
    tangent_frame,
)

__all__ = [
    "AngleReport",
    "ClosedFormImmersion",
    "EDGE_MARGIN",
    "EXTRA_THRESHOLDS",
    "GridSource",
    "ImmersionSource",
    "Jets",
    "MapSource",
    "REPORT_NAMES",
    "SurfaceSecondForm",
    "THRESHOLDS",
    "TangentTriple",
    "VerifyReport",
    "angle_functions",
    "as_source",
    "certify",
    "cubic_form",
    "cubic_trace",
    "dp_length_squared",
    "frame_from_jets",
    "gram_schmidt",
    "lagrangian_field",
    "lagrangian_residual",
    "lagrangian_values",
    "lift_frame_check",
    "rank_p_check",
    "relations_check",
    "structure_operators",
    "surface_second_form",
    "tangent_frame",
    "wrap",
    "xi_alignment",
    "xi_vector",
]
