from .base import EllipticOperator
from .newton import (
    liouville_analytic,
    manufactured_sinh_gordon,
    pde_residual,
    residual_norm,
    round_off_floor,
    sinh_gordon_wave,
    solve_elliptic,
)
from .operators import BetaS3, Liouville, SinhGordon, operator_for
from .problem import EllipticProblem, perimeter_indices, perimeter_of

__all__ = [
    "BetaS3",
    "EllipticOperator",
    "EllipticProblem",
    "Liouville",
    "SinhGordon",
    "liouville_analytic",
    "manufactured_sinh_gordon",
    "operator_for",
    "pde_residual",
    "perimeter_indices",
    "perimeter_of",
    "residual_norm",
    "round_off_floor",
    "sinh_gordon_wave",
    "solve_elliptic",
]
