
import numpy as np
import pytest
from scipy import integrate

from fractafold_spectra import tree_harmonics as th
from fractafold_spectra.errors import PoleError
from fractafold_spectra.graph_core import neg_laplacian_apply


def test_parameter_round_trip():
    for lam in (0.3, 1.0, 3.0, 5.5):
        p = th.TreeParameter.from_lambda(lam)
        np.testing.assert_allclose(p.lam, lam, rtol=1e-13)
        np.testing.assert_allclose(th.lambda_of_z(p.z).real, lam, rtol=1e-13)
    with pytest.raises(ValueError):
        th.TreeParameter.from_lambda(6.0)


def test_phi_closed_values():
    for lam in (0.5, 2.0, 3.0, 4.7):
        p = th.TreeParameter.from_lambda(lam)
        np.testing.assert_allclose(th.phi(p, 0), 1.0, rtol=1e-13)
        np.testing.assert_allclose(th.phi(p, 1), (3 - lam) / 3, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(th.psi(p, 0), 2 * (6 - lam) / 3, rtol=1e-12)
        n = np.arange(8)
        np.testing.assert_allclose(th.phi(p, n), th.phi_signed(p, n), atol=1e-13)
        np.testing.assert_allclose(th.psi(p, n), th.psi_complex(p.z, n).real, atol=1e-12)
        np.testing.assert_allclose(th.phi_signed(p, -1), th.phi_signed(p, 1), atol=1e-13)


def test_phi_at_band_edge_is_finite():
    p = th.TreeParameter(0.0)
    v = th.phi(p, np.arange(5))
    assert np.all(np.isfinite(v))
    np.testing.assert_allclose(v[0], 1.0, atol=1e-6)


def test_c_pole():
    with pytest.raises(PoleError):
        th.c_coeff(0.5)


def test_kernels_are_eigenfunctions():
    ball = th.TreeBall(8)
    for lam in np.linspace(0.25, 5.7, 9):
        p = th.TreeParameter.from_lambda(lam)
        assert th.kernel_residual(ball, "Gamma", p, [(), (1, 0)]) < 1e-10
        assert th.kernel_residual(ball, "Gamma0", p, [(0,), (2, 1)]) < 1e-10


def test_measure_densities_agree():
    t = np.linspace(0.05, th.T_MAX - 0.05, 40)
    np.testing.assert_allclose(th.dm_t(t), th.dm_t_from_c(t), rtol=1e-12)
    lam = 3 - 2 * th.SQRT2 * np.cos(t * th.LOG2)
    np.testing.assert_allclose(th.dm_t(t), th.dm_lambda(lam) * th.dlambda_dt(t), rtol=1e-12)


def test_measure_is_a_probability():
    np.testing.assert_allclose(th.integrate_dm(lambda lam: 1.0)[0], 1.0, atol=1e-12)
    np.testing.assert_allclose(th.measure_grid(64).weights.sum(), 1.0, atol=1e-12)
    # Kesten-McKay with independent quadrature in lambda
    a, b = th.BAND
    val = integrate.quad(th.dm_lambda, a, b, limit=200)[0]
    np.testing.assert_allclose(val, 1.0, atol=1e-8)
    np.testing.assert_allclose(th.cumulative_dm([b])[0], 1.0, atol=1e-10)


def test_resolution_of_identity_profiles():
    I = th.distance_integrals("Gamma", 6)
    np.testing.assert_allclose(I, np.eye(7)[0], atol=1e-10)
    I0 = th.distance_integrals("Gamma0", 6)
    np.testing.assert_allclose(I0, np.eye(7)[0] - (-0.5) ** np.arange(7) / 3, atol=1e-10)
    Ig = th.distance_integrals("Gamma", 6, method="gauss")
    np.testing.assert_allclose(Ig, I, atol=1e-10)


def test_resolve_identity_on_ball():
    ball = th.TreeBall(6)
    v = th.resolve_identity(ball, "Gamma", {(): 1.0, (0, 1): -2.0})
    ref = np.zeros(ball.gamma.n)
    ref[ball.idx("Gamma", ())] = 1.0
    ref[ball.idx("Gamma", (0, 1))] = -2.0
    np.testing.assert_allclose(v, ref, atol=1e-9)


def test_E6_projection_is_six_eigenfunction():
    ball = th.TreeBall(8)
    v = th.project_E6_on_ball(ball, {(1,): 1.0})
    g = ball.gamma0
    r = neg_laplacian_apply(g, v) - 6 * v
    assert np.abs(r[ball.edge_depth <= 6]).max() < 1e-12


def test_hull_engine_matches_brute_sum():
    ball = th.TreeBall(9)
    p = th.TreeParameter.from_lambda(2.2)
    f = th.projected("Gamma", p, {(): 1.0, (1, 0): 0.5})
    vals = ball.evaluate("Gamma", {(): 1.0, (1, 0): 0.5}, th.kernel_profile("Gamma", p))
    mask = ball.depth <= 7
    brute = float(np.sum(vals[mask] ** 2))
    engine, _ = th.HullSum(f, f, ()).sum(7)
    np.testing.assert_allclose(engine, brute, rtol=1e-12)


def test_sphere_counts():
    e = th.delta_expansion("Gamma", {(): 1.0})
    np.testing.assert_array_equal(th.HullSum(e, e, ()).sphere_counts(4), [1, 3, 6, 12, 24])
    e0 = th.delta_expansion("Gamma0", {(0,): 1.0})
    np.testing.assert_array_equal(th.HullSum(e0, e0, (0,)).sphere_counts(3), [1, 4, 8, 16])


def test_edge_distance_matches_graph():
    ball = th.TreeBall(5)
    D = ball.distances("Gamma0", [ball.idx("Gamma0", (2, 1))])[0]
    for e, i in list(ball.edge_index.items())[:60]:
        assert th.edge_distance((2, 1), e) == D[i]


def test_frame_is_tight():
    F = th.frame_combination({(0,): 1.0, (1, 0): -0.7, (2, 1, 1): 0.4})
    res = th.frame_sum(F, radius=30)
    assert res["relative_error"] < 1e-3
    assert res["tail"] < 1e-6


def test_plancherel_residual_halves():
    p = th.TreeParameter.from_lambda(3.0)
    r1 = th.plancherel_residual("Gamma", {(): 1.0}, p, 100)
    r2 = th.plancherel_residual("Gamma", {(): 1.0}, p, 200)
    assert 1.6 <= r1 / r2 <= 2.4


def test_mean_norm_limit():
    p = th.TreeParameter.from_lambda(2.5)
    Pf = th.projected("Gamma", p, {(): 1.0})
    val = th.mean_inner(Pf, Pf, 800)
    np.testing.assert_allclose(val, th.mean_norm_limit("Gamma", p), rtol=0.05)
    np.testing.assert_allclose(th.b_lambda(p), th.b_lambda(p, form="lam"), rtol=1e-12)


def test_resolvent():
    ball = th.TreeBall(10)
    z = complex(0.9, 0.3)
    lam = th.lambda_resolvent(z)
    for level, y in (("Gamma", ()), ("Gamma0", (0,))):
        u = th.resolvent_apply(ball, level, z, {y: 1.0})
        g = ball.graph(level)
        r = lam * u - neg_laplacian_apply(g, u)
        target = np.zeros(g.n)
        target[ball.idx(level, y)] = 1.0
        depth = ball.depth if level == "Gamma" else ball.edge_depth
        np.testing.assert_allclose(r[depth <= 8], target[depth <= 8], atol=1e-12)


def test_five_series_on_first_refinement_is_empty():
    g = th.tree_mesh(4, 1)
    res = th.five_series_search(g, 0, 2)
    assert res.dim == 0
