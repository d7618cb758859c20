import numpy as np
import numpy.testing as npt
import pytest

from nklag.core.quat import I, J, ONE, conjugate_by, qnorm
from nklag.fixtures import FIXTURES, ProductControl, constant_curvature_sphere, flat_torus, product_control, totally_geodesic


def test_fixture_registry():
    assert set(FIXTURES) == {"totally_geodesic", "constant_curvature_sphere", "flat_torus", "product_control"}
    assert FIXTURES["flat_torus"] is flat_torus


def test_flat_torus_origin():
    p, q = flat_torus.point(0.0, 0.0, 0.0)
    npt.assert_allclose(p, ONE)
    npt.assert_allclose(q, np.array([1.0, 0.0, -1.0, 0.0]) / np.sqrt(2.0))


def test_identity_site_values():
    p, q = totally_geodesic.point(0.0, 0.0, 0.0)
    npt.assert_allclose(p, ONE)
    npt.assert_allclose(q, ONE)
    p, q = constant_curvature_sphere.point(0.0, 0.0, 0.0)
    npt.assert_allclose(p, I, atol=1e-15)
    npt.assert_allclose(q, J, atol=1e-15)


@pytest.mark.parametrize("fixture", list(FIXTURES.values()), ids=list(FIXTURES))
def test_points_are_unit(fixture):
    rng = np.random.default_rng(12)
    x = rng.uniform(-1.0, 1.0, size=(3, 50))
    p, q = fixture.point(*x)
    npt.assert_allclose(qnorm(p), 1.0, atol=1e-14)
    npt.assert_allclose(qnorm(q), 1.0, atol=1e-14)


@pytest.mark.parametrize("fixture", list(FIXTURES.values()), ids=list(FIXTURES))
def test_tangents_match_central_differences(fixture):
    sites = np.array(fixture.sample_sites)
    dp, dq = fixture.tangents(*sites.T)
    h = 1e-5
    for a in range(3):
        step = h * np.eye(3)[a]
        p_plus, q_plus = fixture.point(*(sites + step).T)
        p_minus, q_minus = fixture.point(*(sites - step).T)
        npt.assert_allclose(dp[:, a], (p_plus - p_minus) / (2 * h), atol=1e-8)
        npt.assert_allclose(dq[:, a], (q_plus - q_minus) / (2 * h), atol=1e-8)


def test_product_control_start():
    q0 = conjugate_by(np.array([np.cos(0.2), 0.0, 0.0, np.sin(0.2)]), J)
    _, q = ProductControl(q0).point(0.0, 0.3, 0.1)
    npt.assert_allclose(q, q0)
    assert product_control.tangents(0.0, 0.0, 0.0)[1].shape == (3, 4)
