from fractions import Fraction

import numpy as np
import pytest

from fractafold_spectra import lattice_harmonics as lh
from fractafold_spectra.errors import ConvergenceError, NotInE6Error
from fractafold_spectra.graph_core import brute_spectrum, build_graph, edge_graph, neg_laplacian_apply


@pytest.mark.parametrize("parity", ["even", "odd"])
@pytest.mark.parametrize("trig", ["cos", "sin"])
def test_ladder_eigenfunctions_transfer(parity, trig):
    lam, g, f, g0, F = lh.ladder_eigenfunction(0.7, parity, trig, n=20)
    k = np.array([lab[1] for lab in g.labels])
    k0 = np.array([min(a[1], b[1]) for a, b in g0.labels])
    r = neg_laplacian_apply(g, f) - lam * f
    r0 = neg_laplacian_apply(g0, F) - lam * F
    assert np.abs(r[(k > 1) & (k < 18)]).max() < 1e-12
    assert np.abs(r0[(k0 > 1) & (k0 < 17)]).max() < 1e-12


def test_ladder_closed_form_spectrum():
    n = 30
    w = brute_spectrum(build_graph("circular_ladder", n=n)).values
    np.testing.assert_allclose(w, lh.ladder_spectrum(n), atol=1e-10)


def test_ladder_rejects_bad_theta():
    with pytest.raises(ValueError):
        lh.ladder_eigenfunction(4.0, "even")


def test_symbol_matches_floquet_block():
    rng = np.random.default_rng(3)
    for u, v in rng.random((200, 2)):
        lp, lm, _, _ = lh.honeycomb_symbol(u, v)
        np.testing.assert_allclose([lp, lm], np.linalg.eigvalsh(lh.floquet_block(u, v)), atol=1e-12)


def test_bloch_waves_are_eigenfunctions():
    g = lh.honeycomb_patch(4)
    inner = np.array([max(abs(j), abs(k)) <= 2 for _, j, k in g.labels])
    for u, v in ((0.1, 0.37), (0.25, 0.8), (1 / 3, 2 / 3)):
        for sign in (1, -1):
            lam, vals, deg = lh.honeycomb_bloch(u, v, sign, g)
            r = neg_laplacian_apply(g, vals) - lam * vals
            assert np.abs(r[inner]).max() < 1e-12
    # Dirac point: r = 0 and both bands meet at 3
    lam, _, deg = lh.honeycomb_bloch(1 / 3, 2 / 3, 1, g)
    assert deg
    np.testing.assert_allclose(lam, 3.0, atol=1e-12)


@pytest.mark.parametrize("lam", [1.3, 2.0, 4.4])
def test_projector_is_eigenfunction(lam):
    g = lh.honeycomb_patch(5)
    P = lh.honeycomb_projector(lam, {("a", 0, 0): 1.0}, g, grid=128)
    inner = np.array([max(abs(j), abs(k)) <= 3 for _, j, k in g.labels])
    r = neg_laplacian_apply(g, P) - lam * P
    assert np.abs(r[inner]).max() < 1e-12


def test_projector_rotation_equivariance():
    g = lh.honeycomb_patch(5)
    P = lh.honeycomb_projector(1.7, {("a", 0, 0): 1.0}, g, grid=128)
    idx = {lab: i for i, lab in enumerate(g.labels)}
    for lab, i in idx.items():
        rl = lh.honeycomb_rotation(lab)
        if rl in idx and max(abs(lab[1]), abs(lab[2]), abs(rl[1]), abs(rl[2])) <= 3:
            np.testing.assert_allclose(P[idx[rl]], P[i], atol=1e-5)


def test_projector_refuses_band_edges():
    with pytest.raises(ConvergenceError):
        lh.honeycomb_projector(3.0, {("a", 0, 0): 1.0}, lh.honeycomb_patch(2))


def test_reconstruction_recovers_delta():
    g = lh.honeycomb_patch(4)
    rec = lh.honeycomb_reconstruct({("a", 0, 0): 1.0}, g, 64)
    target = np.array([1.0 if lab == ("a", 0, 0) else 0.0 for lab in g.labels])
    np.testing.assert_allclose(rec, target, atol=5e-3)


def test_psi_H_exact_six_eigenfunction():
    g0 = edge_graph(lh.honeycomb_patch(4))
    for j, k in ((0, 0), (1, -2)):
        vec = lh.gamma0_vector(lh.psi_H(j, k), g0).astype(object)
        r = lh.integer_laplacian_apply(g0, vec) - 6 * vec
        assert all(x == 0 for x in r)
    assert lh.satisfies_triangle_criterion(lh.psi_H(2, 1))


def test_hexagons_of_edge_contain_edge():
    for e in lh.hexagon_edges(1, -1):
        hs = lh.hexagons_of_edge(e)
        assert (1, -1) in hs
        assert all(e in lh.hexagon_edges(*h) for h in hs)


def test_E6_round_trip_exact():
    rng = np.random.default_rng(7)
    for _ in range(20):
        c = {(int(rng.integers(-3, 4)), int(rng.integers(-3, 4))):
             Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5))) for _ in range(6)}
        assert lh.hex_E6_decompose(lh.combine_hexagons(c)) == c


def test_triangle_criterion_equivalence():
    # a function failing the triangle sums is rejected; one satisfying them decomposes
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = {(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))): int(rng.integers(1, 5)) for _ in range(4)}
        u = lh.combine_hexagons(c)
        assert lh.satisfies_triangle_criterion(u)
        e = next(iter(u))
        bad = dict(u)
        bad[e] = bad[e] + 1
        assert not lh.satisfies_triangle_criterion(bad)
        with pytest.raises(NotInE6Error):
            lh.hex_E6_decompose(bad)


def test_lattice_inner_matches_fourier():
    f = {(0, 0): 1.0, (1, 0): -0.5, (0, 2): 0.25}
    g = {(0, 0): 0.3, (-1, 1): 1.0}
    np.testing.assert_allclose(lh.lattice_inner(f, g), lh.fourier_inner(f, g), atol=1e-12)
    # <psi_H, psi_H> on Gamma0 is 6, and the hexagon form gives 6 for the unit coefficient
    np.testing.assert_allclose(lh.lattice_inner({(0, 0): 1.0}, {(0, 0): 1.0}), 6.0)


def test_weight_normalization():
    a = np.linspace(0.013, 0.987, 50)
    A, B = np.meshgrid(a, a)
    np.testing.assert_allclose(lh.e6_weight(A, B) * lh.e6_fhat(A, B) ** 2, 1.0, atol=1e-12)


def test_basis_table_matches_direct_quadrature():
    T = lh.hex_E6_basis_table(8, grid=512)
    base = lh.hex_E6_basis_coeff(0, 0)
    for j, k in ((1, 0), (2, -1), (3, 3)):
        # compared up to the constant offset that the hexagon combination ignores
        np.testing.assert_allclose(T[j + 8, k + 8] - T[8, 8], lh.hex_E6_basis_coeff(j, k) - base, atol=1e-7)


def test_translates_become_orthonormal():
    T = lh.hex_E6_basis_table(110, grid=1024)
    errs = [max(abs(lh.translate_inner(T, p, q, R) - float(p == 0 and q == 0))
                for p in range(-2, 3) for q in range(-2, 3)) for R in (25, 50, 100)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4


def test_triangular_symbol_band():
    lo, hi = lh.triangular_symbol_band()
    np.testing.assert_allclose([lo, hi], [0.0, 1.5], atol=1e-12)
    w = brute_spectrum(build_graph("tri_torus", m=9, n=9), "probabilistic").values
    assert w.min() >= lo - 1e-9 and w.max() <= hi + 1e-9


def test_triangular_field_report():
    rep = lh.triangular_field_bands(cutoff=(0, 2), sizes=(6,))
    np.testing.assert_allclose(rep["sigma0_computed"], (0.0, 6.0), atol=1e-10)
    assert rep["sigma0_stated"] == lh.STATED_SIGMA0_FIELD
    assert all(lo <= hi for lo, hi, _ in rep["bands"])


def test_generation_bands_lengths():
    bands = lh.generation_bands((0.0, 6.0), 2)
    assert sorted({n for _, _, n in bands}) == [0, 1, 2]
    assert len(bands) == 1 + 1 + 2
