import numpy as np
import numpy.testing as npt
import pytest

from nklag.core.errors import DomainError
from nklag.core.quat import ONE
from nklag.core.types import Axis, Grid2D, Grid3D, ImmersionGrid, ScalarField2D
from nklag.io import (
    CSV_HEADER,
    read_field,
    read_immersion_csv,
    read_report,
    stereographic,
    write_field,
    write_immersion_csv,
    write_obj,
    write_report,
)
from nklag.verify import REPORT_NAMES, VerifyReport

GRID = Grid3D(Axis.spanning(0.0, 0.2, 3), Axis.spanning(0.1, 0.4, 4), Axis.spanning(-0.3, 0.3, 5))


def random_immersion(seed: int = 0) -> ImmersionGrid:
    rng = np.random.default_rng(seed)
    p = rng.normal(size=GRID.shape + (4,))
    q = rng.normal(size=GRID.shape + (4,))
    p /= np.linalg.norm(p, axis=-1, keepdims=True)
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    lam = rng.uniform(0.1, 1.4, GRID.shape)
    lag = rng.uniform(0.0, 1e-9, GRID.shape)
    return ImmersionGrid(GRID, p, q, lam, lag_residual=lag, loop_closure=3.5e-9, case=3)


def test_field_file_layout(tmp_path):
    grid = Grid2D(Axis(0.5, 0.25, 3), Axis(-1.0, 0.5, 4))
    values = np.arange(12.0).reshape(3, 4) / 7.0
    field = ScalarField2D(values, 0.5, -1.0, 0.25, 0.5)
    path = tmp_path / "field.txt"
    write_field(path, field)

    lines = path.read_text().splitlines()
    assert lines[0] == "3 4 0.5 -1 0.25 0.5"
    assert len(lines) == 5
    assert [float(x) for x in lines[2].split()] == values[:, 1].tolist()

    back = read_field(path)
    assert back.grid == grid
    assert np.array_equal(back.values, values)


def test_field_file_shape_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 3 0 0 1 1\n1 2 3\n4 5 6\n")
    with pytest.raises(DomainError):
        read_field(path)


def test_csv_round_trip_is_exact(tmp_path):
    immersion = random_immersion()
    path = tmp_path / "grid.csv"
    write_immersion_csv(path, immersion)

    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[-1] == "# masked: 0"
    assert len([line for line in lines if not line.startswith("#")]) == 1 + np.prod(GRID.shape)

    back = read_immersion_csv(path)
    assert back.grid.shape == GRID.shape
    assert np.array_equal(back.p, immersion.p)
    assert np.array_equal(back.q, immersion.q)
    assert np.array_equal(back.lam, immersion.lam)
    assert np.array_equal(back.lag_residual, immersion.lag_residual)
    assert back.loop_closure == 3.5e-9
    assert back.case == 3

    again = tmp_path / "again.csv"
    write_immersion_csv(again, back)
    assert again.read_text() == path.read_text()


def test_csv_omits_masked_sites(tmp_path):
    immersion = random_immersion(1)
    immersion.mask[1, 2, 3] = False
    immersion.mask[0, 1, 1] = False
    path = tmp_path / "masked.csv"
    write_immersion_csv(path, immersion)
    assert path.read_text().splitlines()[-1] == "# masked: 2"

    back = read_immersion_csv(path)
    assert back.masked_count == 2
    assert not back.mask[1, 2, 3]
    assert np.all(np.isnan(back.p[1, 2, 3]))
    npt.assert_array_equal(back.p[back.mask], immersion.p[immersion.mask])


def test_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "foreign.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(DomainError):
        read_immersion_csv(path)


def test_report_round_trip(tmp_path):
    values = dict.fromkeys(REPORT_NAMES, 1.0 / 3.0)
    values["mean_curvature_p"] = None
    path = tmp_path / "report.txt"
    write_report(path, VerifyReport(values))
    lines = path.read_text().splitlines()
    assert lines[0] == "max_lagrangian_residual=0.33333333333333331"
    assert "mean_curvature_p=skipped" in lines
    assert read_report(path) == values


def test_stereographic_projection():
    npt.assert_allclose(stereographic(ONE), [1.0, 0.0, 0.0])
    npt.assert_allclose(stereographic(np.array([0.0, 0.0, 0.0, 1.0])), [0.0, 0.0, 0.0])


def test_obj_export(tmp_path):
    immersion = random_immersion(2)
    immersion.p[..., 3] = np.abs(immersion.p[..., 3])
    path = tmp_path / "mesh.obj"
    write_obj(path, immersion, t_index=1)

    lines = path.read_text().splitlines()
    vertices = [line for line in lines if line.startswith("v ")]
    faces = [line for line in lines if line.startswith("f ")]
    n_u, n_v = GRID.shape[1:]
    assert len(vertices) == n_u * n_v
    assert len(faces) == 2 * (n_u - 1) * (n_v - 1)
    assert faces[0] == f"f 1 {n_v + 1} {n_v + 2}"
    assert faces[1] == f"f 1 {n_v + 2} 2"
    first = [float(x) for x in vertices[0].split()[1:]]
    npt.assert_allclose(first, stereographic(immersion.p[1, 0, 0]))


def test_obj_export_bad_slice(tmp_path):
    with pytest.raises(DomainError):
        write_obj(tmp_path / "mesh.obj", random_immersion(), t_index=5)
