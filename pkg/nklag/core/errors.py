"""nkLag exceptions."""

from __future__ import annotations


class NKLagError(Exception):
    """Base class of every error raised by nkLag."""


class DomainError(NKLagError):
    """An operation was called outside its domain."""


class OutsideDomainError(DomainError):
    """A Case-1 site does not satisfy e^(ω+μ) − 2 − 2cos(4t) > 0."""


class BranchError(DomainError):
    """The tanΛ denominator vanishes on the selected branch."""


class ConfigError(NKLagError):
    """Unknown key or ill-typed value in a configuration file."""


class NoConvergenceError(NKLagError):
    def __init__(self, message: str, residual: float, iterations: int) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class IntegrationError(NKLagError):
    def __init__(self, message: str, site: tuple[int, ...] | None = None) -> None:
        if site is not None:
            message = f"{message} at site {site}"
        super().__init__(message)
        self.site = site


class PathDependenceError(NKLagError):
    def __init__(self, defect: float, site: tuple[int, ...]) -> None:
        super().__init__(f"loop-closure defect {defect:.3e} at site {site}")
        self.defect = defect
        self.site = site


class FrameQualityError(NKLagError):
    def __init__(self, defect: float, site: tuple | None = None) -> None:
        where = "" if site is None else f" at site {site}"
        super().__init__(f"tangency defect {defect:.3e}{where}")
        self.defect = defect
        self.site = site


class StructureViolationError(NKLagError):
    def __init__(self, commutator: float, site: tuple | None = None) -> None:
        where = "" if site is None else f" at site {site}"
        super().__init__(f"A and B do not commute, |[A,B]| = {commutator:.3e}{where}")
        self.commutator = commutator
        self.site = site
