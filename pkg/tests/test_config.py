from pathlib import Path

import numpy as np
import numpy.testing as npt
import pytest
import yaml

from nklag.config import QUARTER_LN3, SECTIONS, BuildConfig, SolveConfig, VerifyConfig, resolve_field
from nklag.core.errors import ConfigError
from nklag.core.types import Axis, Grid2D
from nklag.io import write_field
from nklag.pde import liouville_analytic, manufactured_sinh_gordon, sinh_gordon_wave

CONFIG_DIR = Path(__file__).parents[1] / "config"
GRID = Grid2D(Axis.spanning(-0.5, 0.5, 5), Axis.spanning(-0.5, 0.5, 5))


def dump(tmp_path, data, name="config.yml") -> Path:
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def test_from_dict_normalises_and_coerces():
    config = SolveConfig.from_dict({"kind": "beta-s3", "tol": "1e-8", "n_u": 9})
    assert config.kind == "beta_s3"
    assert config.tol == 1e-8
    assert config.n_u == 9
    assert config.max_iter == 50


@pytest.mark.parametrize(
    "data",
    [{"nope": 1}, {"n_u": "many"}, {"tol": True}, {"n_u": 3.5}, {"boundary": 2}, {"tol": -1.0}],
)
def test_from_dict_rejects_bad_values(data):
    with pytest.raises(ConfigError):
        SolveConfig.from_dict(data)


def test_load_config_reads_its_section(tmp_path):
    path = dump(tmp_path, {"build": {"case": 2, "n_t": 5, "h": [0, 1, 0, 0]}, "verify": {"fd_step": 1e-5}})
    build = BuildConfig.load_config(path)
    assert build.case == 2
    assert build.n_t == 5
    assert build.h == [0.0, 1.0, 0.0, 0.0]
    assert build.grid.shape == (5, 11, 11)
    assert VerifyConfig.load_config(path).fd_step == 1e-5
    assert SolveConfig.load_config(path) == SolveConfig()


def test_yaml_exponent_without_dot_is_a_float(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("solve:\n  tol: 1e-8\n")
    assert SolveConfig.load_config(path).tol == 1e-8


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert BuildConfig.load_config(path) == BuildConfig()


@pytest.mark.parametrize(
    "text",
    ["unknown:\n  a: 1\n", "build: 3\n", "- 1\n- 2\n", "build: [\n"],
    ids=["unknown-section", "scalar-section", "not-a-mapping", "invalid-yaml"],
)
def test_load_config_rejects_bad_files(tmp_path, text):
    path = tmp_path / "bad.yml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        BuildConfig.load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        SolveConfig.load_config(tmp_path / "absent.yml")


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.yml")), ids=lambda p: p.name)
def test_shipped_configs_load(path):
    for section in (SolveConfig, BuildConfig, VerifyConfig):
        section.load_config(path)
    assert set(yaml.safe_load(path.read_text())) <= set(SECTIONS)


def test_build_config_validation():
    with pytest.raises(ConfigError):
        BuildConfig(branch=0)
    with pytest.raises(ConfigError):
        BuildConfig(h=[1.0, 0.0, 0.0])
    with pytest.raises(ConfigError):
        BuildConfig(n_t=1).grid
    with pytest.raises(ConfigError):
        BuildConfig(u_min=0.2, u_max=0.1).grid
    with pytest.raises(ConfigError):
        BuildConfig(case=4).inputs()


def test_build_inputs_per_case():
    case1 = BuildConfig(case=1, branch=-1).inputs()
    assert set(case1) == {"omega", "mu", "branch"}
    assert case1["branch"] == -1
    case2 = BuildConfig(case=2, h=[0.0, 0.0, 1.0, 0.0]).inputs()
    npt.assert_array_equal(case2["beta"].values, QUARTER_LN3)
    npt.assert_array_equal(case2["h"], [0.0, 0.0, 1.0, 0.0])
    case3 = BuildConfig().inputs()
    assert set(case3) == {"omega"}
    assert case3["omega"].shape == (11, 11)


def test_verify_thresholds():
    config = VerifyConfig.from_dict({"thresholds": {"theta1_deviation": 1e-3}})
    assert config.thresholds == {"theta1_deviation": 1e-3}
    with pytest.raises(ConfigError):
        VerifyConfig.from_dict({"thresholds": {"bogus": 1.0}})


def test_verify_extra_thresholds_and_margin():
    config = VerifyConfig.from_dict({"thresholds": {"dp_e2_length": 1e-5}, "margin": 4})
    assert config.thresholds == {"dp_e2_length": 1e-5}
    assert config.margin == 4
    assert VerifyConfig().margin == 2
    with pytest.raises(ConfigError):
        VerifyConfig.from_dict({"margin": -1})


def test_resolve_field_sources(tmp_path):
    npt.assert_array_equal(resolve_field("zero", GRID).values, 0.0)
    npt.assert_array_equal(resolve_field("const:0.5", GRID).values, 0.5)
    npt.assert_array_equal(resolve_field("analytic:c=1", GRID).values, liouville_analytic(1.0, GRID).values)
    npt.assert_array_equal(resolve_field("wave:0.5", GRID).values, sinh_gordon_wave(0.5, GRID).values)
    manufactured = resolve_field("manufactured:0.5", GRID)
    npt.assert_array_equal(manufactured.values, manufactured_sinh_gordon(0.5, GRID)[0].values)
    assert manufactured.provenance == "analytic"

    path = tmp_path / "field.txt"
    write_field(path, manufactured)
    from_file = resolve_field(f"file:{path}", GRID)
    npt.assert_array_equal(from_file.values, manufactured.values)
    assert from_file.provenance == "fd"


@pytest.mark.parametrize("spec", ["spline:1", "const:abc", "analytic:c=x", "file:/nonexistent/field.txt"])
def test_resolve_field_rejects(spec):
    with pytest.raises(ConfigError):
        resolve_field(spec, GRID)


def test_solve_source_field():
    assert SolveConfig().source_field() is None
    config = SolveConfig(boundary="manufactured:0.5", n_u=5, n_v=5)
    source = config.source_field()
    _, expected = manufactured_sinh_gordon(0.5, config.grid)
    npt.assert_array_equal(source.values, expected.values)
    explicit = SolveConfig(source="const:2", n_u=5, n_v=5).source_field()
    assert np.all(explicit.values == 2.0)
