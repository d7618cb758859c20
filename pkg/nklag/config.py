"""Run configuration read from YAML files.

A file holds up to three sections, `solve`, `build` and `verify`, one per
subcommand. Every key is optional and type-checked; unknown keys are errors.
"""

from __future__ import annotations

import types
import typing
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .core.errors import ConfigError
from .core.types import Axis, Grid2D, Grid3D, ScalarField2D
from .io import read_field
from .pde import liouville_analytic, manufactured_sinh_gordon, sinh_gordon_wave
from .verify.report import EXTRA_THRESHOLDS, REPORT_NAMES
from .verify.sources import EDGE_MARGIN

SECTIONS = ("solve", "build", "verify")
QUARTER_LN3 = 0.25 * float(np.log(3.0))


def _checked(name: str, value: Any, hint: Any) -> Any:
    origin = typing.get_origin(hint)
    if origin in (types.UnionType, typing.Union):
        args = typing.get_args(hint)
        if value is None and type(None) in args:
            return None
        hint = next(a for a in args if a is not type(None))
        origin = typing.get_origin(hint)

    if hint is float and not isinstance(value, bool):
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                pass
    elif hint is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    elif hint is str and isinstance(value, str):
        return value
    elif origin is list and isinstance(value, list):
        (item,) = typing.get_args(hint)
        return [_checked(f"{name}[{i}]", v, item) for i, v in enumerate(value)]
    elif origin is dict and isinstance(value, dict):
        _, item = typing.get_args(hint)
        return {str(k): _checked(f"{name}.{k}", v, item) for k, v in value.items()}
    raise ConfigError(f"{name}: expected {getattr(hint, '__name__', hint)}, got {value!r}")


def _read_section(config_path: str | Path, section: str) -> dict[str, Any]:
    try:
        with open(config_path, "r") as fpt:
            config_dict = yaml.safe_load(fpt) or {}
    except OSError as e:
        raise ConfigError(f"cannot read {config_path}: {e.strerror}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{config_path} is not valid YAML: {e}") from e
    if not isinstance(config_dict, dict):
        raise ConfigError(f"{config_path}: expected a mapping of sections")
    unknown = sorted(set(config_dict) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"{config_path}: unknown sections {unknown}, expected some of {list(SECTIONS)}")
    data = config_dict.get(section) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{config_path}: section {section!r} must be a mapping")
    return data


class _Section:
    """from_dict / load_config shared by the section dataclasses."""

    section: typing.ClassVar[str]

    @classmethod
    def from_dict(cls, config_dict: dict[str, Any]):
        hints = typing.get_type_hints(cls)
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(config_dict) - names)
        if unknown:
            raise ConfigError(f"[{cls.section}] unknown keys {unknown}")
        checked = {k: _checked(f"{cls.section}.{k}", v, hints[k]) for k, v in config_dict.items()}
        return cls(**checked)

    @classmethod
    def load_config(cls, config_path: str | Path):
        return cls.from_dict(_read_section(config_path, cls.section))


def _axis(name: str, lo: float, hi: float, count: int) -> Axis:
    if count < 2 or not hi > lo:
        raise ConfigError(f"{name} axis needs min < max and at least 2 points, got [{lo}, {hi}] with {count}")
    return Axis.spanning(lo, hi, count)


@dataclass
class SolveConfig(_Section):
    section: typing.ClassVar[str] = "solve"

    kind: str = "sinh_gordon"
    u_min: float = -0.5
    u_max: float = 0.5
    n_u: int = 33
    v_min: float = -0.5
    v_max: float = 0.5
    n_v: int = 33
    boundary: str = "zero"
    source: str | None = None
    initial_guess: str = "zero"
    tol: float = 1e-10
    max_iter: int = 50

    def __post_init__(self) -> None:
        self.kind = self.kind.replace("-", "_")
        if self.tol <= 0 or self.max_iter < 1:
            raise ConfigError(f"solve needs tol > 0 and max_iter >= 1, got {self.tol}, {self.max_iter}")

    @property
    def grid(self) -> Grid2D:
        return Grid2D(_axis("u", self.u_min, self.u_max, self.n_u), _axis("v", self.v_min, self.v_max, self.n_v))

    def source_field(self) -> ScalarField2D | None:
        """The right-hand side; `manufactured:<amp>` boundaries bring their own."""
        if self.source is not None:
            return resolve_field(self.source, self.grid)
        if self.boundary.startswith("manufactured:"):
            return manufactured_sinh_gordon(_number(self.boundary), self.grid)[1]
        return None


@dataclass
class BuildConfig(_Section):
    section: typing.ClassVar[str] = "build"

    case: int = 3
    t_min: float = 0.0
    t_max: float = 0.1
    n_t: int = 11
    u_min: float = 0.0
    u_max: float = 0.1
    n_u: int = 11
    v_min: float = 0.0
    v_max: float = 0.1
    n_v: int = 11
    omega: str = "zero"
    mu: str = "analytic:c=1"
    beta: str = f"const:{QUARTER_LN3!r}"
    branch: int = 1
    h: list[float] = field(default_factory=lambda: [1.0, 0.0, 0.0, 0.0])
    q0: list[float] | None = None

    def __post_init__(self) -> None:
        if self.branch not in (-1, 1):
            raise ConfigError(f"branch must be +1 or -1, got {self.branch}")
        for name in ("h", "q0"):
            value = getattr(self, name)
            if value is not None and len(value) != 4:
                raise ConfigError(f"{name} must list 4 quaternion components, got {value}")

    @property
    def grid(self) -> Grid3D:
        return Grid3D(
            _axis("t", self.t_min, self.t_max, self.n_t),
            _axis("u", self.u_min, self.u_max, self.n_u),
            _axis("v", self.v_min, self.v_max, self.n_v),
        )

    def inputs(self) -> dict[str, Any]:
        """Keyword arguments for the builder of `case`."""
        surface = self.grid.surface
        match self.case:
            case 1:
                return {
                    "omega": resolve_field(self.omega, surface),
                    "mu": resolve_field(self.mu, surface),
                    "branch": self.branch,
                }
            case 2:
                return {"beta": resolve_field(self.beta, surface), "h": np.array(self.h)}
            case 3:
                return {"omega": resolve_field(self.omega, surface)}
        raise ConfigError(f"case must be 1, 2 or 3, got {self.case}")


@dataclass
class VerifyConfig(_Section):
    section: typing.ClassVar[str] = "verify"

    fd_step: float = 1e-4
    margin: int = EDGE_MARGIN
    thresholds: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.margin < 0:
            raise ConfigError(f"[verify] margin must be non-negative, got {self.margin}")
        unknown = sorted(set(self.thresholds) - set(REPORT_NAMES) - set(EXTRA_THRESHOLDS))
        if unknown:
            raise ConfigError(f"[verify] unknown thresholds {unknown}")


def _number(spec: str) -> float:
    text = spec.split(":", 1)[1]
    if text.startswith("c="):
        text = text[2:]
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"field source {spec!r} needs a number") from None


def resolve_field(spec: str, grid: Grid2D) -> ScalarField2D:
    """Sample a field source string on `grid`."""
    kind = spec.split(":", 1)[0]
    match kind:
        case "zero":
            return ScalarField2D.constant(grid, 0.0)
        case "const":
            return ScalarField2D.constant(grid, _number(spec))
        case "analytic":
            return liouville_analytic(_number(spec), grid)
        case "manufactured":
            return manufactured_sinh_gordon(_number(spec), grid)[0]
        case "wave":
            return sinh_gordon_wave(_number(spec), grid)
        case "file":
            try:
                return read_field(spec.split(":", 1)[1])
            except OSError as e:
                raise ConfigError(f"cannot read field file: {e}") from e
    raise ConfigError(f"unknown field source {spec!r}, expected zero, const:, analytic:c=, manufactured:, wave: or file:")
