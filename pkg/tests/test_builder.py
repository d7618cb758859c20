import numpy as np
import numpy.testing as npt
import pytest

from nklag.builder import (
    Case1Builder,
    Case2Builder,
    Case3Builder,
    SurfaceData,
    build,
    builder_for,
    chart,
    chart_tangents,
    chart_to_frame,
    classify_case,
    closed_form_q,
    codazzi_mu_laplacian,
    cubic_coefficients,
    forms_case1,
    forms_case2,
    forms_case3,
    frame_relation,
    frame_to_chart,
    integrability_residual,
    integrate_q,
    lambda_case1,
    lambda_case2,
    lambda_case3,
    lambda_derivatives,
)
from nklag.core.errors import BranchError, DomainError, OutsideDomainError, PathDependenceError
from nklag.core.quat import I, J, ONE, conjugate_by, embed_im, im_part, qconj, qexp_im, qmul, qnorm
from nklag.core.structure import SQRT3
from nklag.core.types import Axis, ConnectionForms, Grid3D, ScalarField2D
from nklag.io import read_immersion_csv, write_immersion_csv
from nklag.pde import liouville_analytic, sinh_gordon_wave

QUARTER_LN3 = 0.25 * np.log(3.0)


def cube(t: tuple[float, float], u: tuple[float, float], v: tuple[float, float], n: int = 11) -> Grid3D:
    return Grid3D(Axis.spanning(*t, n), Axis.spanning(*u, n), Axis.spanning(*v, n))


CASE1_GRID = cube((np.pi / 4 - 0.05, np.pi / 4 + 0.05), (0.0, 0.1), (0.0, 0.1))
CASE3_GRID = cube((0.0, 0.05), (0.0, 0.05), (0.0, 0.05))


def random_admissible(seed: int, n: int = 200):
    rng = np.random.default_rng(seed)
    omega = rng.uniform(-0.2, 0.2, n)
    mu = rng.uniform(1.5, 2.0, n)
    t = rng.uniform(0.6, 0.9, n)
    return omega, mu, t


@pytest.mark.parametrize("branch, expected", [(1, 0.857072), (-1, 1.289761)])
def test_lambda_case1_examples(branch, expected):
    lam = lambda_case1(0.0, 0.0, np.pi / 4, branch)
    assert lam == pytest.approx(expected, abs=1e-6)
    assert np.tan(lam) == pytest.approx(2.0 / SQRT3 if branch == 1 else 2.0 * SQRT3)


def test_lambda_case1_outside_domain():
    with pytest.raises(OutsideDomainError):
        lambda_case1(0.0, 0.0, 0.0)


def test_lambda_case1_branch_error():
    # e^μ = 8 at t = π/4: the denominator is 2 − √8 < 0 on branch −1.
    with pytest.raises(BranchError):
        lambda_case1(0.0, np.log(8.0), np.pi / 4, -1)


def test_lambda_case1_solves_defining_equation():
    omega, mu, t = random_admissible(3)
    lam = lambda_case1(omega, mu, t)
    lhs = (2.0 * SQRT3 * np.exp(omega) / np.tan(lam) - 2.0 * np.sin(2.0 * t)) ** 2
    rhs = np.exp(omega + mu) - 2.0 - 2.0 * np.cos(4.0 * t)
    npt.assert_allclose(lhs, rhs, atol=1e-10)
    assert np.all((lam > 0) & (lam < np.pi / 2))


def test_lambda_derivatives_match_finite_differences():
    omega0, mu0, t0 = random_admissible(4, 20)
    omega_u, mu_u, omega_v, mu_v = 0.3, -0.7, -0.2, 0.4
    h = 1e-5

    def lam_at(dt=0.0, du=0.0, dv=0.0):
        return lambda_case1(omega0 + omega_u * du + omega_v * dv, mu0 + mu_u * du + mu_v * dv, t0 + dt)

    lam = lam_at()
    lam_t, lam_u, lam_v = lambda_derivatives(omega0, mu_u, mu_v, omega_u, omega_v, t0, lam)
    npt.assert_allclose(lam_t, (lam_at(dt=h) - lam_at(dt=-h)) / (2 * h), atol=1e-7)
    npt.assert_allclose(lam_u, (lam_at(du=h) - lam_at(du=-h)) / (2 * h), atol=1e-7)
    npt.assert_allclose(lam_v, (lam_at(dv=h) - lam_at(dv=-h)) / (2 * h), atol=1e-7)


@pytest.mark.parametrize("branch", [1, -1])
def test_codazzi_expression_equals_minus_exp_mu(branch):
    rng = np.random.default_rng(5)
    omega, mu, t = rng.uniform(-0.2, 0.2, 2000), rng.uniform(0.5, 2.0, 2000), rng.uniform(0.6, 0.9, 2000)
    c = np.exp(omega + mu) - 2.0 - 2.0 * np.cos(4.0 * t)
    keep = c > 0.01
    keep[keep] &= branch * np.sqrt(c[keep]) + 2.0 * np.sin(2.0 * t[keep]) > 0.1
    assert np.count_nonzero(keep) > 20
    omega, mu, t = omega[keep], mu[keep], t[keep]
    lam = lambda_case1(omega, mu, t, branch)
    npt.assert_allclose(codazzi_mu_laplacian(omega, lam, t), -np.exp(mu), rtol=1e-10)


def test_codazzi_example():
    lam = np.arctan(2.0 / SQRT3)
    assert codazzi_mu_laplacian(0.0, lam, np.pi / 4) == pytest.approx(-1.0)


def test_frame_relation_reproduces_lambda_derivatives():
    omega, mu, t = random_admissible(6, 50)
    rng = np.random.default_rng(7)
    mu_u, mu_v, omega_u, omega_v = rng.normal(size=(4, 50))
    lam = lambda_case1(omega, mu, t)
    gradient = np.stack(lambda_derivatives(omega, mu_u, mu_v, omega_u, omega_v, t, lam), axis=-1)
    along = np.einsum("nia,na->ni", frame_relation(omega, mu_u, mu_v, omega_u, omega_v, t, lam), gradient)
    h = cubic_coefficients(omega, mu_u, mu_v, omega_u, omega_v, t, lam)
    npt.assert_allclose(along[:, 0], h.h13_3, atol=1e-10)
    npt.assert_allclose(along[:, 1], h.h23_3, atol=1e-10)
    npt.assert_allclose(along[:, 2], -h.h22_3, atol=1e-10)


def test_cubic_tensor_is_symmetric_and_traceless():
    omega, mu, t = random_admissible(8, 10)
    lam = lambda_case1(omega, mu, t)
    h = cubic_coefficients(omega, 0.1, -0.2, 0.3, 0.4, t, lam).tensor()
    npt.assert_allclose(h, np.swapaxes(h, -1, -2))
    npt.assert_allclose(h, np.swapaxes(h, -3, -2))
    npt.assert_allclose(np.einsum("...iik->...k", h), 0.0, atol=1e-15)


def test_case1_forms_are_integrable():
    mu = liouville_analytic(1.0, CASE1_GRID.surface)
    forms, lam = forms_case1(ScalarField2D.constant(CASE1_GRID.surface), mu, CASE1_GRID)
    assert np.all(forms.mask)
    assert np.all(lam.admissible())
    assert max(integrability_residual(forms)) < 1e-5


def test_case1_forms_lose_normal_component_without_gradients():
    grid = cube((0.7, 0.8), (0.0, 0.1), (0.0, 0.1), n=5)
    forms, _ = forms_case1(ScalarField2D.constant(grid.surface), ScalarField2D.constant(grid.surface, 2.0), grid)
    n = SurfaceData.from_omega(ScalarField2D.constant(grid.surface), grid.surface).normal_form
    unit = n / np.linalg.norm(n, axis=-1, keepdims=True)
    for beta in (forms.beta2, forms.beta3):
        npt.assert_allclose(np.sum(beta * unit, axis=-1), 0.0, atol=1e-14)


def test_case1_outside_domain_build():
    grid = cube((0.0, 0.1), (1.0, 1.1), (0.0, 0.1))
    builder = Case1Builder(ScalarField2D.constant(grid.surface), liouville_analytic(1.0, grid.surface))
    with pytest.raises(OutsideDomainError):
        builder.build(grid)


def test_case1_build_is_lagrangian():
    mu = liouville_analytic(1.0, CASE1_GRID.surface)
    immersion = build(1, {"omega": ScalarField2D.constant(CASE1_GRID.surface), "mu": mu}, CASE1_GRID)
    assert immersion.case == 1
    assert immersion.masked_count == 0
    assert np.nanmax(immersion.lag_residual[2:-2, 2:-2, 2:-2]) < 1e-6
    assert immersion.unit_drift() < 1e-10


def test_case3_lambda_and_forms():
    npt.assert_allclose(lambda_case3(0.0), np.pi / 3)
    npt.assert_allclose(np.tan(lambda_case3([-0.3, 0.2])), SQRT3 * np.exp([-0.3, 0.2]))

    forms, lam = forms_case3(ScalarField2D.constant(CASE3_GRID.surface), CASE3_GRID)
    npt.assert_allclose(lam.values, np.pi / 3)
    assert max(integrability_residual(forms)) < 1e-8

    surface = SurfaceData.from_omega(ScalarField2D.constant(CASE3_GRID.surface), CASE3_GRID.surface)
    npt.assert_allclose(forms.beta2[0], 0.5 * (surface.alpha2 - surface.alpha3), atol=1e-14)


def test_case3_build_has_lambda_pi_over_three():
    immersion = Case3Builder(ScalarField2D.constant(CASE3_GRID.surface)).build(CASE3_GRID)
    npt.assert_allclose(immersion.lam, np.pi / 3)
    assert immersion.loop_closure < 1e-6
    assert np.nanmax(immersion.lag_residual[2:-2, 2:-2, 2:-2]) < 1e-6
    npt.assert_allclose(immersion.q[0, 0, 0], ONE)


def test_integrate_q_exact_exponential():
    grid = Grid3D(Axis(0.0, 1.0, 2), Axis(0.0, 1.0, 1), Axis(0.0, 1.0, 1))
    beta1 = np.zeros((2, 1, 1, 3))
    beta1[..., 0] = np.pi / 2
    zeros = np.zeros_like(beta1)
    q, defect = integrate_q(ConnectionForms(beta1, zeros, zeros.copy(), grid), ONE)
    npt.assert_allclose(q[1, 0, 0], I, atol=1e-15)
    assert defect == 0.0


def test_integrate_q_zero_forms_keep_start():
    grid = cube((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), n=4)
    zeros = np.zeros(grid.shape + (3,))
    q0 = np.array([0.5, 0.5, 0.5, 0.5])
    q, _ = integrate_q(ConnectionForms(zeros, zeros.copy(), zeros.copy(), grid), q0)
    npt.assert_allclose(q, np.broadcast_to(q0, q.shape))


def test_integrate_q_rejects_non_unit_start():
    grid = cube((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), n=3)
    zeros = np.zeros(grid.shape + (3,))
    with pytest.raises(DomainError):
        integrate_q(ConnectionForms(zeros, zeros.copy(), zeros.copy(), grid), 2.0 * ONE)


def test_integrate_q_detects_path_dependence():
    grid = cube((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), n=5)
    beta2 = np.zeros(grid.shape + (3,))
    beta3 = np.zeros(grid.shape + (3,))
    beta2[..., 0] = 1.0
    beta3[..., 1] = 1.0
    with pytest.raises(PathDependenceError):
        integrate_q(ConnectionForms(np.zeros_like(beta2), beta2, beta3, grid), ONE)


def twisted_forms(n: int) -> tuple[ConnectionForms, np.ndarray]:
    """Exact forms of q = e^{uB} e^{vC} e^{uB}, which vary along both u and v."""
    grid = cube((0.0, 0.1), (0.0, 0.4), (0.0, 0.4), n=n)
    _, u, v = grid.mesh()
    b, c = np.array([0.0, 0.9, 0.4]), np.array([0.7, 0.0, -0.5])
    eu, ev = qexp_im(u[..., None] * b), qexp_im(v[..., None] * c)
    q = qmul(qmul(eu, ev), eu)
    beta2 = im_part(qmul(qmul(qconj(q), embed_im(b)), q)) + b
    beta3 = im_part(qmul(qmul(qconj(eu), embed_im(c)), eu))
    return ConnectionForms(np.zeros(grid.shape + (3,)), beta2, beta3, grid), q


def test_integrate_q_matches_exact_solution_and_closes_loops():
    forms, exact = twisted_forms(21)
    q, fine = integrate_q(forms, ONE)
    npt.assert_allclose(q, exact, atol=1e-6)
    assert max(integrability_residual(forms)) < 1e-5

    _, coarse = integrate_q(twisted_forms(11)[0], ONE)
    assert 0.0 < fine < coarse / 3.0


def wave_grid(n: int) -> Grid3D:
    return cube((0.0, 0.1), (0.05, 0.45), (0.05, 0.45), n=n)


def test_case3_forms_with_varying_omega_converge():
    residuals = [
        max(integrability_residual(forms_case3(sinh_gordon_wave(0.5, grid.surface), grid)[0]))
        for grid in map(wave_grid, (11, 21, 41))
    ]
    assert residuals[0] < 1e-4
    assert residuals[0] > 3.0 * residuals[1] > 9.0 * residuals[2]


def test_integrability_residual_margin():
    forms, _ = forms_case3(sinh_gordon_wave(0.5, wave_grid(11).surface), wave_grid(11))
    assert max(integrability_residual(forms, margin=4)) <= max(integrability_residual(forms))
    assert max(integrability_residual(forms, margin=0)) >= max(integrability_residual(forms))
    with pytest.raises(DomainError):
        integrability_residual(forms, margin=-1)


def test_case3_build_with_varying_omega():
    grid = cube((0.0, 0.1), (0.05, 0.15), (0.05, 0.15))
    omega = sinh_gordon_wave(0.5, grid.surface)
    immersion = Case3Builder(omega).build(grid)
    assert immersion.masked_count == 0
    assert immersion.loop_closure < 1e-6
    assert np.nanmax(immersion.lag_residual[2:-2, 2:-2, 2:-2]) < 1e-6
    npt.assert_allclose(immersion.lam, np.broadcast_to(lambda_case3(omega.values), grid.shape))
    assert np.ptp(immersion.lam) > 0.01


def test_case1_masks_sites_outside_admissible_region(tmp_path):
    # e^μ ≈ 2 for c = 1/2, so e^(ω+μ) − 2 − 2cos 4t turns negative past t = 3π/8.
    grid = Grid3D(Axis.spanning(np.pi / 4, np.pi / 4 + 0.5, 11), Axis.spanning(0.0, 0.05, 5), Axis.spanning(0.0, 0.05, 5))
    builder = Case1Builder(ScalarField2D.constant(grid.surface), liouville_analytic(0.5, grid.surface))
    immersion = builder.build(grid)
    assert immersion.masked_count == 3 * 25
    assert np.all(immersion.mask[:8])
    assert not np.any(immersion.mask[8:])
    assert np.all(np.isnan(immersion.q[8:]))
    assert np.all(np.isfinite(immersion.q[:8]))

    path = tmp_path / "masked.csv"
    write_immersion_csv(path, immersion)
    assert path.read_text().splitlines()[-1] == "# masked: 75"
    npt.assert_array_equal(read_immersion_csv(path).mask, immersion.mask)


def test_chart_frame_change_of_basis():
    rng = np.random.default_rng(9)
    t, u = rng.uniform(-1, 1, size=(2, 30))
    v = rng.uniform(0.2, 1.2, 30)
    x = chart(t, u, v)
    frame = np.stack([qmul(x, unit) for unit in (I, J, np.array([0.0, 0.0, 0.0, 1.0]))], axis=-2)
    npt.assert_allclose(chart_tangents(t, u, v), np.einsum("nab,nbk->nak", chart_to_frame(t, v), frame), atol=1e-14)
    npt.assert_allclose(np.einsum("nab,nbc->nac", frame_to_chart(t, v), chart_to_frame(t, v)), np.broadcast_to(np.eye(3), (30, 3, 3)), atol=1e-12)


def test_chart_singularity():
    with pytest.raises(DomainError):
        frame_to_chart(0.3, 0.0)
    grid = cube((0.0, 0.1), (0.0, 0.1), (0.0, 0.1), n=5)
    with pytest.raises(DomainError):
        forms_case2(ScalarField2D.constant(grid.surface, QUARTER_LN3), grid)


def test_case2_coefficients_at_quarter_ln3():
    assert lambda_case2(QUARTER_LN3) == pytest.approx(np.pi / 3)
    assert 1.0 - SQRT3 * np.exp(-2.0 * QUARTER_LN3) == pytest.approx(0.0, abs=1e-15)
    grid = cube((0.0, 0.1), (0.0, 0.1), (0.6, 0.7), n=5)
    forms, _ = forms_case2(ScalarField2D.constant(grid.surface, QUARTER_LN3), grid)
    x = chart(*grid.mesh())
    npt.assert_allclose(forms.beta1, -2.0 * conjugate_by(x, I)[..., 1:], atol=1e-14)


def test_case2_build_matches_closed_form():
    grid = cube((0.0, 0.02), (0.0, 0.02), (0.6, 0.62), n=21)
    immersion = Case2Builder(ScalarField2D.constant(grid.surface, QUARTER_LN3)).build(grid)
    npt.assert_allclose(immersion.q, closed_form_q(grid), atol=1e-8)
    npt.assert_allclose(immersion.p, conjugate_by(chart(*grid.mesh()), I), atol=1e-14)
    npt.assert_allclose(qnorm(immersion.q), 1.0, atol=1e-12)


def test_case2_rejects_non_unit_h():
    grid = cube((0.0, 0.1), (0.0, 0.1), (0.6, 0.7), n=5)
    with pytest.raises(DomainError):
        forms_case2(ScalarField2D.constant(grid.surface, QUARTER_LN3), grid, 2.0 * ONE)


def test_case2_default_start_uses_h():
    grid = cube((0.0, 0.1), (0.0, 0.1), (0.6, 0.7), n=5)
    h = np.array([np.cos(0.4), 0.0, np.sin(0.4), 0.0])
    builder = Case2Builder(ScalarField2D.constant(grid.surface, QUARTER_LN3), h)
    x0 = chart(0.0, 0.0, 0.6)
    npt.assert_allclose(builder.default_q0(grid), conjugate_by(h, conjugate_by(x0, J)), atol=1e-15)


def test_builder_for_rejects_bad_input():
    with pytest.raises(DomainError):
        builder_for(4)
    with pytest.raises(DomainError):
        builder_for(2, omega=None)


@pytest.mark.parametrize(
    "h13, h12, lam, expected",
    [
        (0.0, np.cos(1.0) * np.sin(1.0) / SQRT3, 1.0, 2),
        (0.3, -np.sin(2.0) / SQRT3, 1.0, 3),
        (0.3, 0.1, 1.0, 1),
    ],
)
def test_classify_case(h13, h12, lam, expected):
    assert classify_case(h13, h12, lam) == expected
