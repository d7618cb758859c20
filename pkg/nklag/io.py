"""Text codecs for fields, immersion grids, verification reports and OBJ meshes.

Every float is written with 17 significant digits so that a write followed by
a read reproduces it exactly.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .core.errors import DomainError
from .core.types import Axis, Grid3D, ImmersionGrid, ScalarField2D
from .verify.report import REPORT_NAMES, VerifyReport

logger = logging.getLogger("nklag")

CSV_HEADER = "u,v,t,p0,p1,p2,p3,q0,q1,q2,q3,Lambda,lag_residual"


def _g(x: float) -> str:
    return format(float(x), ".17g")


def write_field(path: str | Path, field: ScalarField2D) -> None:
    """Header `n_u n_v u0 v0 hu hv`, then one line of n_u values per v."""
    n_u, n_v = field.shape
    lines = [f"{n_u} {n_v} " + " ".join(_g(x) for x in (field.u0, field.v0, field.hu, field.hv))]
    lines += [" ".join(_g(x) for x in row) for row in field.values.T]
    Path(path).write_text("\n".join(lines) + "\n")
    logger.info(f"wrote {field} to {path}")


def read_field(path: str | Path) -> ScalarField2D:
    lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    try:
        head = lines[0].split()
        n_u, n_v = int(head[0]), int(head[1])
        u0, v0, hu, hv = (float(x) for x in head[2:6])
        values = np.array([[float(x) for x in line.split()] for line in lines[1:]])
    except (IndexError, ValueError) as e:
        raise DomainError(f"{path}: malformed field file ({e})") from e
    if values.shape != (n_v, n_u):
        raise DomainError(f"{path}: header announces {n_u}x{n_v} values, found {values.T.shape}")
    return ScalarField2D(values.T.copy(), u0, v0, hu, hv)


def write_immersion_csv(path: str | Path, immersion: ImmersionGrid) -> None:
    """Unmasked sites in (t, u, v) order, then trailers; `# masked: N` is always the last line."""
    tt, uu, vv = immersion.grid.mesh()
    rows = [CSV_HEADER]
    for index in zip(*np.nonzero(immersion.mask)):
        values = (
            uu[index], vv[index], tt[index], *immersion.p[index], *immersion.q[index],
            immersion.lam[index], immersion.lag_residual[index],
        )
        rows.append(",".join(_g(x) for x in values))
    axes = (immersion.grid.t, immersion.grid.u, immersion.grid.v)
    rows.append("# grid: " + " ".join(f"{_g(a.start)} {_g(a.step)} {a.count}" for a in axes))
    rows.append(f"# loop_closure: {_g(immersion.loop_closure)}")
    if immersion.case is not None:
        rows.append(f"# case: {immersion.case}")
    rows.append(f"# masked: {immersion.masked_count}")
    Path(path).write_text("\n".join(rows) + "\n")
    logger.info(f"wrote {immersion} to {path}")


def _axis(values: np.ndarray) -> Axis:
    values = np.unique(values)
    if values.size == 1:
        return Axis(float(values[0]), 1.0, 1)
    step = float(np.min(np.diff(values)))
    count = int(round((values[-1] - values[0]) / step)) + 1
    return Axis.spanning(float(values[0]), float(values[-1]), count)


def read_immersion_csv(path: str | Path) -> ImmersionGrid:
    """Inverse of `write_immersion_csv`; omitted sites come back masked.

    Without a `# grid:` trailer the axes are inferred from the sampled coordinates.
    """
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise DomainError(f"{path}: expected header {CSV_HEADER!r}")
    trailer = {}
    rows = []
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            trailer[key.strip()] = value.strip()
        elif line.strip():
            rows.append([float(x) for x in line.split(",")])
    if not rows:
        raise DomainError(f"{path}: no unmasked sites")

    data = np.array(rows)
    if "grid" in trailer:
        items = trailer["grid"].split()
        grid = Grid3D(*(Axis(float(items[k]), float(items[k + 1]), int(items[k + 2])) for k in (0, 3, 6)))
    else:
        grid = Grid3D(_axis(data[:, 2]), _axis(data[:, 0]), _axis(data[:, 1]))
    index = tuple(
        np.rint((data[:, col] - axis.start) / axis.step).astype(int)
        for col, axis in ((2, grid.t), (0, grid.u), (1, grid.v))
    )
    p = np.full(grid.shape + (4,), np.nan)
    q = np.full(grid.shape + (4,), np.nan)
    lam = np.full(grid.shape, np.nan)
    lag = np.full(grid.shape, np.nan)
    mask = np.zeros(grid.shape, dtype=bool)
    p[index], q[index] = data[:, 3:7], data[:, 7:11]
    lam[index], lag[index] = data[:, 11], data[:, 12]
    mask[index] = True

    case = int(trailer["case"]) if "case" in trailer else None
    loop = float(trailer.get("loop_closure", "nan"))
    return ImmersionGrid(grid, p, q, lam, mask, lag, loop, case)


def write_report(path: str | Path, report: VerifyReport) -> None:
    Path(path).write_text("\n".join(report.lines()) + "\n")


def read_report(path: str | Path) -> dict[str, float | None]:
    out = {}
    for line in Path(path).read_text().splitlines():
        name, _, value = line.partition("=")
        if name not in REPORT_NAMES:
            raise DomainError(f"{path}: unknown report entry {name!r}")
        out[name] = None if value == "skipped" else float(value)
    return out


def stereographic(x: np.ndarray) -> np.ndarray:
    """Projection of S³ from (0, 0, 0, −1): x ↦ (x₀, x₁, x₂)/(1 + x₃)."""
    return x[..., :3] / (1.0 + x[..., 3:4])


def write_obj(path: str | Path, immersion: ImmersionGrid, t_index: int = 0) -> None:
    """The p-surface at one t-slice as a triangle mesh."""
    n_t, n_u, n_v = immersion.grid.shape
    if not 0 <= t_index < n_t:
        raise DomainError(f"t_index {t_index} outside [0, {n_t})")
    p = immersion.p[t_index]
    ok = immersion.mask[t_index] & np.all(np.isfinite(p), axis=-1) & (p[..., 3] > -1.0 + 1e-9)
    number = np.zeros((n_u, n_v), dtype=int)
    number[ok] = np.arange(1, np.count_nonzero(ok) + 1)

    lines = [f"# p-surface at t = {_g(immersion.grid.t.values[t_index])}, stereographic from (0, 0, 0, -1)"]
    lines += [f"v {_g(x)} {_g(y)} {_g(z)}" for x, y, z in stereographic(p[ok])]
    for i in range(n_u - 1):
        for j in range(n_v - 1):
            a, b, c, d = number[i, j], number[i + 1, j], number[i + 1, j + 1], number[i, j + 1]
            if a and b and c:
                lines.append(f"f {a} {b} {c}")
            if a and c and d:
                lines.append(f"f {a} {c} {d}")
    Path(path).write_text("\n".join(lines) + "\n")
    logger.info(f"wrote {np.count_nonzero(ok)} vertices to {path}")
