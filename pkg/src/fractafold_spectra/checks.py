"""Verification suites behind `fractafold verify`.

Each suite returns a list of Check records in a fixed order so reports are
reproducible byte for byte. Suites are deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import decimation as dec
from . import fractafold as ff
from . import lattice_harmonics as lh
from . import tree_harmonics as th
from .graph_core import (
    S1_matrix, brute_spectrum, build_graph, edge_graph, octahedron,
)


@dataclass(frozen=True)
class Check:
    suite: str
    check: str
    passed: bool
    residual: float

    def to_json(self) -> dict:
        return {"suite": self.suite, "check": self.check,
                "status": "pass" if self.passed else "fail", "residual": float(self.residual)}


def _ck(suite, name, residual, tol):
    return Check(suite, name, bool(residual <= tol), float(residual))


def suite_k4(cfg) -> list[Check]:
    g = build_graph("K4")
    g0 = edge_graph(g)
    out = []
    w = brute_spectrum(g).values
    out.append(_ck("k4", "spectrum Gamma = {0,4^3}", np.abs(w - [0, 4, 4, 4]).max(), 1e-9))
    w0 = brute_spectrum(g0).values
    out.append(_ck("k4", "spectrum Gamma0 = {0,4^3,6^2}", np.abs(w0 - [0, 4, 4, 4, 6, 6]).max(), 1e-9))
    S1 = S1_matrix(g, g0).toarray().astype(int)
    L = g.laplacian().toarray().astype(int)
    L0 = g0.laplacian().toarray().astype(int)
    e1 = np.abs(S1.T @ S1 - (6 * np.eye(4, dtype=int) - L)).max()
    e2 = np.abs(S1 @ S1.T - (6 * np.eye(6, dtype=int) - L0)).max()
    out.append(_ck("k4", "S2 S1 = 6I + Delta_Gamma (exact)", float(e1), 0.0))
    out.append(_ck("k4", "S1 S2 = 6I + Delta_Gamma0 (exact)", float(e2), 0.0))
    a = np.sort([x for x in 6 - w if abs(x) > 1e-9])
    b = np.sort([x for x in 6 - w0 if abs(x) > 1e-9])
    out.append(_ck("k4", "nonzero spectra of S2S1 and S1S2 agree",
                   np.abs(a - b).max() if a.size == b.size else math.inf, 1e-9))
    return out


def suite_decimation(cfg) -> list[Check]:
    rep = ff.decimation_spectrum_check(octahedron(), 3, tol=1e-8)
    out = []
    for r in rep.levels:
        out.append(_ck("decimation", f"K4 level {r.level}: all classified",
                       float(r.unclassified + abs(r.n_vertices - r.decimated - sum(r.exceptional.values()))), 0.0))
        out.append(_ck("decimation", f"K4 level {r.level}: extension residual", r.extension_residual, 1e-8))
    return out


def suite_interval(cfg) -> list[Check]:
    z = np.linspace(0.0, 40.0, 401)
    vals = dec.frak_R(dec.INTERVAL, z)
    err = np.abs(vals - (2.0 - 2.0 * np.cos(np.sqrt(z)))).max()
    out = [_ck("interval", "fR(z) = 2 - 2cos(sqrt z) on [0,40]", err, 1e-9)]
    worst = 0.0
    for N in (8, 16):
        for k in range(1, N):
            lam, u = ff.interval_sine(N, k)
            lam2, u2 = ff.interval_sine(2 * N, k)
            worst = max(worst, np.abs(ff.interval_extend(u, lam2) - u2).max())
    out.append(_ck("interval", "sine extension matches finer samples", worst, 1e-12))
    return out


def suite_tree_kernel(cfg) -> list[Check]:
    ball = th.TreeBall(12)
    lams = np.linspace(th.BAND[0], th.BAND[1], 52)[1:-1]
    worst = {"Gamma": 0.0, "Gamma0": 0.0}
    for lam in lams:
        p = th.TreeParameter.from_lambda(float(lam))
        worst["Gamma"] = max(worst["Gamma"], th.kernel_residual(ball, "Gamma", p, [()]))
        worst["Gamma0"] = max(worst["Gamma0"], th.kernel_residual(ball, "Gamma0", p, [(0,)]))
    return [_ck("tree-kernel", f"{lvl} kernel eigen-equation, radius 12", v, 1e-10)
            for lvl, v in worst.items()]


def suite_tree_resolve(cfg) -> list[Check]:
    mass, _ = th.integrate_dm(lambda lam: 1.0)
    out = [_ck("tree-resolve", "total mass of dm", abs(mass - 1.0), 1e-8)]
    I = th.distance_integrals("Gamma", 4)
    out.append(_ck("tree-resolve", "int phi(d) dm = delta, d <= 4",
                   np.abs(I - np.eye(5)[0]).max(), 1e-6))
    I0 = th.distance_integrals("Gamma0", 4)
    target = np.eye(5)[0] - (-0.5) ** np.arange(5) / 3.0
    out.append(_ck("tree-resolve", "int psi(d)/(6-l) dm = delta - P6, d <= 4",
                   np.abs(I0 - target).max(), 1e-6))
    return out


def suite_tree_plancherel(cfg) -> list[Check]:
    Ns = cfg.get("N") or [200, 400]
    out = []
    for lam in (2.5, 3.0, 3.5):
        p = th.TreeParameter.from_lambda(lam)
        res = [th.plancherel_residual("Gamma", {(): 1.0}, p, N) for N in Ns]
        for a, b, Na, Nb in zip(res, res[1:], Ns, Ns[1:]):
            ratio = a / b
            expect = Nb / Na
            ok = 0.8 * expect <= ratio <= 1.2 * expect
            out.append(Check("tree-plancherel", f"lambda={lam}: residual ratio N={Na}->{Nb}", ok, ratio))
    return out


def suite_frame(cfg) -> list[Check]:
    rng = np.random.default_rng(cfg.get("seed", 0))
    worst = 0.0
    for _ in range(5):
        data = {}
        for _ in range(3):
            depth = int(rng.integers(1, 4))
            lab = (int(rng.integers(0, 3)),) + tuple(int(x) for x in rng.integers(0, 2, depth - 1))
            data[lab] = float(rng.normal())
        worst = max(worst, th.frame_sum(th.frame_combination(data), radius=30)["relative_error"])
    return [_ck("tree-frame", "tight frame with constant 3", worst, 1e-3)]


def suite_hex_e6(cfg) -> list[Check]:
    rng = np.random.default_rng(cfg.get("seed", 0))
    g0 = edge_graph(lh.honeycomb_patch(6))
    vec = lh.gamma0_vector(lh.psi_H(0, 0), g0).astype(object)
    r = lh.integer_laplacian_apply(g0, vec) - 6 * vec
    out = [_ck("hex-e6", "psi_H is a 6-eigenfunction (integers)", float(max(abs(x) for x in r)), 0.0)]
    fails = 0
    for _ in range(100):
        c = {}
        for _ in range(10):
            h = (int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
            c[h] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        c = {h: v for h, v in c.items() if v != 0}
        fails += lh.hex_E6_decompose(lh.combine_hexagons(c)) != c
    out.append(_ck("hex-e6", "round-trip decomposition on 100 random elements", float(fails), 0.0))
    a = np.linspace(0, 1, 200, endpoint=False) + 0.5 / 200
    A, B = np.meshgrid(a, a, indexing="ij")
    out.append(_ck("hex-e6", "weight * fhat^2 = 1 on a 200^2 grid",
                   float(np.abs(lh.e6_weight(A, B) * lh.e6_fhat(A, B) ** 2 - 1).max()), 1e-12))
    return out


def suite_honeycomb(cfg) -> list[Check]:
    rng = np.random.default_rng(cfg.get("seed", 0))
    uv = rng.random((1000, 2))
    worst = 0.0
    for u, v in uv:
        lp, lm, _, _ = lh.honeycomb_symbol(u, v)
        e = np.linalg.eigvalsh(lh.floquet_block(u, v))
        worst = max(worst, abs(lp - e[0]), abs(lm - e[1]))
    return [_ck("honeycomb", "symbol vs 2x2 Floquet block, 1000 samples", worst, 1e-12)]


def suite_ladder(cfg) -> list[Check]:
    n = 200
    w = brute_spectrum(build_graph("circular_ladder", n=n)).values
    out = [_ck("ladder", "circular ladder n=200 closed form", np.abs(w - lh.ladder_spectrum(n)).max(), 1e-9)]
    w0 = brute_spectrum(edge_graph(build_graph("circular_ladder", n=n))).values
    low = np.sum(w0 < 2 - 1e-9)
    high = np.sum((w0 > 2 + 1e-9) & (w0 <= 4 + 1e-9))
    out.append(_ck("ladder", "edge graph counts: [2,4] vs twice [0,2]", abs(high / (2 * low) - 1), 0.1))
    return out


def suite_triangular(cfg) -> list[Check]:
    lo, hi = lh.triangular_symbol_band()
    out = []
    maxima = []
    for n in (6, 12, 24):
        w = brute_spectrum(build_graph("tri_torus", m=n, n=n), "probabilistic").values
        out.append(_ck("triangular", f"tri_torus {n}x{n} inside symbol band",
                       max(0.0, lo - w.min(), w.max() - hi), 1e-9))
        maxima.append(w.max())
    mono = all(b >= a - 1e-12 for a, b in zip(maxima, maxima[1:]))
    out.append(Check("triangular", "torus maxima monotone toward band edge", mono, hi - maxima[-1]))
    return out


def suite_fractafold(cfg) -> list[Check]:
    mesh = ff.FractafoldMesh(octahedron(), 2)
    good = ff.resolution_of_identity(mesh, use_M=True)
    bad = ff.resolution_of_identity(mesh, use_M=False)
    return [
        _ck("fractafold", "K4 level 2 resolution of identity with M", good.identity_error, 1e-8),
        Check("fractafold", "same with M = 1 fails", bad.identity_error > 1e-3, bad.identity_error),
    ]


def increment_profile(addr: dec.EigenvalueAddress) -> tuple[float, float]:
    """(C, fitted base-5 decay exponent) of the M partial-product increments."""
    _, partials = dec.M_of_lambda(addr, return_partials=True)
    inc = np.abs(np.diff(partials))
    k = np.arange(2, len(partials) + 1)
    keep = inc > 1e-15
    C = float(np.max(inc[keep] * 5.0 ** k[keep]))
    slope = np.polyfit(k[keep][2:], np.log(inc[keep][2:]) / math.log(5.0), 1)[0]
    return C, float(-slope)


def suite_M(cfg) -> list[Check]:
    C, expo = increment_profile(dec.EigenvalueAddress(m0=0, seed=4.0, word=(dec.Branch.HI,)))
    # the factor is 1 - 2x/15 + O(x^2), so the increments decay with exponent exactly 1
    out = [_ck("M-product", "increments bounded by C 5^-k", 0.0 if np.isfinite(C) else math.inf, 0.0),
           _ck("M-product", "increment decay exponent equals 1", abs(expo - 1.0), 0.05)]
    lam, u = ff.interval_sine(8, 3)
    ratios = ff.level_norm_ratios(lam, u, 6)
    out.append(_ck("M-product", "interval level-norm ratio vs factor at level 6",
                   abs(ratios[-1][1] / ratios[-1][2] - 1), 0.01))
    return out


SUITES: dict[str, Callable] = {
    "k4": suite_k4,
    "decimation": suite_decimation,
    "interval": suite_interval,
    "tree-kernel": suite_tree_kernel,
    "tree-resolve": suite_tree_resolve,
    "tree-plancherel": suite_tree_plancherel,
    "tree-frame": suite_frame,
    "hex-e6": suite_hex_e6,
    "honeycomb": suite_honeycomb,
    "ladder": suite_ladder,
    "triangular": suite_triangular,
    "fractafold": suite_fractafold,
    "M-product": suite_M,
}
GROUPS = {"default": ["k4", "decimation"], "all": list(SUITES)}


def resolve_suites(names: list[str]) -> list[str]:
    out = []
    for n in names:
        for s in GROUPS.get(n, [n]):
            if s not in SUITES:
                raise KeyError(s)
            if s not in out:
                out.append(s)
    return out
