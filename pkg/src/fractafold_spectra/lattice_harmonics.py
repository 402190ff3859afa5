"""Periodic examples: the ladder, the honeycomb lattice with its edge graph
(the kagome lattice) and the triangular-lattice fractal field.

Honeycomb conventions: a(j, k) ~ b(j, k), b(j - 1, k), b(j, k - 1). The
hexagon H[j, k] has the cyclic vertex list

    a(j, k), b(j, k), a(j + 1, k), b(j + 1, k - 1), a(j + 1, k - 1), b(j, k - 1)

and its six edges e1..e6 (in that cyclic order) are vertices of Gamma0. The
function psi_H takes the values +1, -1, +1, -1, +1, -1 on e1..e6. Hexagons
sharing an edge differ by one of [1, 0], [0, 1], [1, -1] up to sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy import optimize

from .decimation import GASKET, frak_R_preimages
from .errors import ConvergenceError, NotInE6Error
from .graph_core import CellGraph, brute_spectrum, build_graph, edge_graph

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# ladder

def ladder_eigenfunction(theta: float, parity: str, trig: str = "cos", n: int = 20):
    """Eigenfunction of the ladder with its transfer to Gamma0 on ladder_segment(n).

    Returns (lambda, gamma, values on gamma, gamma0, values on gamma0).
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    if parity not in ("even", "odd"):
        raise ValueError("parity must be even or odd")
    tf = {"cos": np.cos, "sin": np.sin}[trig]
    g = build_graph("ladder_segment", n=n)
    g0 = edge_graph(g)
    k = np.array([lab[1] for lab in g.labels], dtype=float)
    side = np.array([1.0 if lab[0] == "a" else -1.0 for lab in g.labels])
    base = tf(k * theta)
    if parity == "even":
        lam = 2.0 - 2.0 * math.cos(theta)
        f = base
    else:
        lam = 4.0 - 2.0 * math.cos(theta)
        f = side * base
    F = np.zeros(g0.n)
    for i, (x, y) in enumerate(g0.labels):
        (sx, kx), (_, ky) = x, y
        if kx == ky:  # rung w_k
            F[i] = tf(kx * theta) if parity == "even" else 0.0
        else:  # rail edge [s_k, s_{k+1}]
            kk = min(kx, ky) + 0.5
            if parity == "even":
                F[i] = tf(kk * theta) * math.cos(theta / 2.0)
            else:
                F[i] = tf(kk * theta) * (1.0 if sx == "a" else -1.0)
    return lam, g, f, g0, F


def ladder_spectrum(n: int) -> np.ndarray:
    """Closed-form spectrum of circular_ladder(n)."""
    th = TWO_PI * np.arange(n) / n
    return np.sort(np.r_[2.0 - 2.0 * np.cos(th), 4.0 - 2.0 * np.cos(th)])


# ---------------------------------------------------------------------------
# honeycomb Floquet-Bloch analysis

@dataclass(frozen=True)
class BlochParameter:
    u: float
    v: float

    @property
    def s(self) -> complex:
        return 1.0 + np.exp(2j * math.pi * self.u) + np.exp(2j * math.pi * self.v)

    @property
    def r(self) -> float:
        return abs(self.s)

    @property
    def theta(self) -> float:
        return float(np.angle(self.s))


def honeycomb_symbol(u, v):
    """(lambda_plus, lambda_minus, theta, r) with lambda = 3 -/+ r."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    r2 = 3.0 + 2.0 * np.cos(TWO_PI * u) + 2.0 * np.cos(TWO_PI * v) + 2.0 * np.cos(TWO_PI * (u - v))
    r = np.sqrt(np.maximum(r2, 0.0))
    s = 1.0 + np.exp(2j * math.pi * u) + np.exp(2j * math.pi * v)
    return 3.0 - r, 3.0 + r, np.angle(s), r


def floquet_block(u: float, v: float) -> np.ndarray:
    s = complex(BlochParameter(u, v).s)
    return np.array([[3.0, -np.conj(s)], [-s, 3.0]])


def honeycomb_patch(radius: int) -> CellGraph:
    return build_graph("honeycomb_patch", radius=radius)


def honeycomb_bloch(u: float, v: float, sign: int, g: CellGraph, r_eps: float = 1e-12):
    """Bloch wave on a honeycomb graph; returns (lambda, values, degenerate flag).

    sign=+1 gives gamma = e^{i theta} and lambda = 3 - r; sign=-1 gives
    gamma = -e^{i theta} and lambda = 3 + r. At r = 0 theta is undefined and
    gamma = sign is used.
    """
    p = BlochParameter(u, v)
    degenerate = p.r < r_eps
    gamma = float(sign) * (1.0 if degenerate else np.exp(1j * p.theta))
    lam = 3.0 - sign * p.r
    vals = np.empty(g.n, dtype=complex)
    for i, (s, j, k) in enumerate(g.labels):
        ph = np.exp(2j * math.pi * (j * u + k * v))
        vals[i] = ph if s == "a" else gamma * ph
    return lam, vals, degenerate


def _grad_lambda(u, v, sign):
    """Gradient of lambda_sign = 3 - sign r with respect to (u, v)."""
    _, _, _, r = honeycomb_symbol(u, v)
    dr2_du = -2.0 * TWO_PI * (np.sin(TWO_PI * u) + np.sin(TWO_PI * (u - v)))
    dr2_dv = -2.0 * TWO_PI * (np.sin(TWO_PI * v) - np.sin(TWO_PI * (u - v)))
    rr = np.maximum(r, 1e-300)
    return -sign * dr2_du / (2.0 * rr), -sign * dr2_dv / (2.0 * rr)


def _lam_sign(u, v, sign):
    lp, lm, _, _ = honeycomb_symbol(u, v)
    return lp if sign > 0 else lm


GRID_OFFSET = (math.sqrt(5.0) - 1.0) / 4.0


def level_set_samples(lam: float, grid: int, newton_steps: int = 8):
    """Marching-triangle samples of the level set {lambda_sign(u, v) = lam}.

    Returns (u, v, weight, sign) where weight is segment length divided by
    |grad lambda|, the co-area density. Sample points are pulled onto the
    level set by Newton steps along the gradient so that each Bloch wave is an
    exact eigenfunction at lam.
    """
    sign = 1 if lam < 3.0 else -1
    h = 1.0 / grid
    # irrational offset keeps grid nodes off the straight level lines at lambda = 2, 4
    x = (np.arange(grid + 1) + GRID_OFFSET) * h
    U, V = np.meshgrid(x, x, indexing="ij")
    L = _lam_sign(U, V, sign)
    out_u, out_v, out_w = [], [], []
    # two triangles per square: (00, 10, 11) and (00, 11, 01)
    c00 = (U[:-1, :-1], V[:-1, :-1], L[:-1, :-1])
    c10 = (U[1:, :-1], V[1:, :-1], L[1:, :-1])
    c11 = (U[1:, 1:], V[1:, 1:], L[1:, 1:])
    c01 = (U[:-1, 1:], V[:-1, 1:], L[:-1, 1:])
    for tri in ((c00, c10, c11), (c00, c11, c01)):
        P = np.stack([np.stack([t[0], t[1]], axis=-1) for t in tri], axis=0).reshape(3, -1, 2)
        F = np.stack([t[2] for t in tri], axis=0).reshape(3, -1) - lam
        pts = []
        for a, b in ((0, 1), (1, 2), (2, 0)):
            fa, fb = F[a], F[b]
            cross = (fa * fb < 0) | ((fa == 0) & (fb != 0))
            s = np.where(cross, fa / np.where(fa - fb == 0, 1.0, fa - fb), np.nan)
            pts.append(P[a] + s[:, None] * (P[b] - P[a]))
        pts = np.stack(pts, axis=0)  # (3 edges, T, 2)
        ok = ~np.isnan(pts[..., 0])
        two = ok.sum(axis=0) == 2
        if not np.any(two):
            continue
        idx = np.flatnonzero(two)
        okk = ok[:, idx]
        first = np.argmax(okk, axis=0)
        last = 2 - np.argmax(okk[::-1], axis=0)
        p1 = pts[first, idx]
        p2 = pts[last, idx]
        seg = np.linalg.norm(p2 - p1, axis=1)
        mid = 0.5 * (p1 + p2)
        out_u.append(mid[:, 0])
        out_v.append(mid[:, 1])
        out_w.append(seg)
    if not out_u:
        raise ConvergenceError(f"no level set found at lambda = {lam}")
    u = np.concatenate(out_u)
    v = np.concatenate(out_v)
    seg = np.concatenate(out_w)
    for _ in range(newton_steps):
        gu, gv = _grad_lambda(u, v, sign)
        g2 = gu * gu + gv * gv
        d = (_lam_sign(u, v, sign) - lam) / np.maximum(g2, 1e-300)
        u = u - d * gu
        v = v - d * gv
    gu, gv = _grad_lambda(u, v, sign)
    w = seg / np.sqrt(gu * gu + gv * gv)
    return u, v, w, sign


def honeycomb_projector(lam: float, f: Mapping[tuple, complex], g: CellGraph, grid: int = 256,
                        eps: float = 1e-3) -> np.ndarray:
    """P_lambda f on the vertices of g via the co-area form of the level-set integral."""
    if min(abs(lam), abs(lam - 3.0), abs(lam - 6.0)) < eps:
        raise ConvergenceError("lambda too close to a band edge or the Dirac point")
    u, v, w, sign = level_set_samples(lam, grid)
    return _project_samples(u, v, w, sign, f, g)


def _project_samples(u, v, w, sign, f, g):
    _, _, theta, _ = honeycomb_symbol(u, v)
    eth = np.exp(1j * theta)
    fa = np.zeros(u.shape, dtype=complex)
    fb = np.zeros(u.shape, dtype=complex)
    for (s, j, k), val in f.items():
        ph = np.exp(-2j * math.pi * (j * u + k * v)) * val
        if s == "a":
            fa += ph
        else:
            fb += ph
    coef = 0.5 * (fa + sign * np.conj(eth) * fb) * w
    labs = g.labels
    J = np.array([lab[1] for lab in labs], dtype=float)
    K = np.array([lab[2] for lab in labs], dtype=float)
    isb = np.array([lab[0] == "b" for lab in labs])
    phase = np.exp(2j * math.pi * (np.outer(J, u) + np.outer(K, v)))
    amp = np.where(isb[:, None], sign * eth[None, :], 1.0)
    return (phase * amp) @ coef


def honeycomb_reconstruct(f: Mapping[tuple, complex], g: CellGraph, grid: int,
                          n_lambda: int | None = None) -> np.ndarray:
    """Midpoint rule for int_0^6 P_lambda f d(lambda) using level sets at resolution grid."""
    n_lambda = n_lambda or 4 * grid
    edges = np.linspace(0.0, 6.0, n_lambda + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    out = np.zeros(g.n, dtype=complex)
    for lam in mids:
        try:
            u, v, w, sign = level_set_samples(lam, grid)
        except ConvergenceError:
            continue
        out += _project_samples(u, v, w, sign, f, g) * (edges[1] - edges[0])
    return out


def honeycomb_rotation(label: tuple) -> tuple:
    """Rotation by 120 degrees about a(0, 0)."""
    s, j, k = label
    if s == "a":
        return ("a", -j - k, j)
    return ("b", -j - k - 1, j)


# ---------------------------------------------------------------------------
# E6 on the honeycomb edge graph

def _edge(x: tuple, y: tuple) -> frozenset:
    return frozenset((x, y))


def hexagon_vertices(j: int, k: int) -> list[tuple]:
    return [("a", j, k), ("b", j, k), ("a", j + 1, k), ("b", j + 1, k - 1),
            ("a", j + 1, k - 1), ("b", j, k - 1)]


def hexagon_edges(j: int, k: int) -> list[frozenset]:
    vs = hexagon_vertices(j, k)
    return [_edge(vs[i], vs[(i + 1) % 6]) for i in range(6)]


HEX_SIGNS = (1, -1, 1, -1, 1, -1)
HEX_NEIGHBORS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def psi_H(j: int, k: int) -> dict:
    return {e: s for e, s in zip(hexagon_edges(j, k), HEX_SIGNS)}


def hexagons_of_edge(e: frozenset) -> list[tuple[int, int]]:
    """The two hexagons containing a Gamma0 vertex."""
    x, y = sorted(e)
    (sa, ja, ka), (sb, jb, kb) = (x, y) if x[0] == "a" else (y, x)
    if (ja, ka) == (jb, kb):
        return [(ja, ka), (ja - 1, ka + 1)]
    if (jb, kb) == (ja - 1, ka):
        return [(jb, kb), (jb, kb + 1)]
    if (jb, kb) == (ja, ka - 1):
        return [(ja - 1, ka), (ja, ka)]
    raise ValueError(f"{e} is not an edge of the honeycomb")


def combine_hexagons(coeffs: Mapping[tuple, object]) -> dict:
    """sum_H c_H psi_H as a dict over Gamma0 vertices (exact for ints and Fractions)."""
    out: dict = {}
    for (j, k), c in coeffs.items():
        for e, s in psi_H(j, k).items():
            out[e] = out.get(e, 0) + s * c
    return {e: v for e, v in out.items() if v != 0}


def triangle_sums(u: Mapping[frozenset, object]) -> dict:
    """Sum of u over the triangle (three edges) at every Gamma vertex touching supp u."""
    sums: dict = {}
    for e, val in u.items():
        for x in e:
            sums[x] = sums.get(x, 0) + val
    return sums


def satisfies_triangle_criterion(u: Mapping[frozenset, object], tol: float = 0.0) -> bool:
    return all(abs(s) <= tol for s in triangle_sums(u).values())


def hex_E6_decompose(u: Mapping[frozenset, object], tol: float = 0.0) -> dict:
    """Coefficients c with u = sum c_H psi_H for compactly supported u in E6.

    Hexagons are processed from the top row down and right to left within a
    row. When H[j, k] is reached its upper neighbour H[j, k + 1] is final, and
    the shared vertex [b(j, k), a(j + 1, k)] (sign -1 in H[j, k], +1 in
    H[j, k + 1]) gives c[j, k] = c[j, k + 1] - u(shared vertex).
    Exact for int or Fraction input; tol applies to float input.
    """
    u = {e: v for e, v in u.items() if v != 0}
    if not satisfies_triangle_criterion(u, tol):
        raise NotInE6Error("triangle sums do not vanish; input is not in E6")
    hexes = sorted({h for e in u for h in hexagons_of_edge(e)}, key=lambda h: (-h[1], -h[0]))
    c: dict = {}
    for (j, k) in hexes:
        shared = _edge(("b", j, k), ("a", j + 1, k))
        c[(j, k)] = c.get((j, k + 1), 0) - u.get(shared, 0)
    c = {h: v for h, v in c.items() if (abs(v) > tol if tol else v != 0)}
    back = combine_hexagons(c)
    keys = set(back) | set(u)
    err = max((abs(back.get(e, 0) - u.get(e, 0)) for e in keys), default=0)
    if err > tol:
        raise NotInE6Error(f"peeling left a remainder of size {err}")
    return c


def gamma0_vector(u: Mapping[frozenset, object], g0: CellGraph) -> np.ndarray:
    """Dense vector on an edge graph of a honeycomb patch."""
    index = {_edge(*lab): i for i, lab in enumerate(g0.labels)}
    vec = np.zeros(g0.n, dtype=object if any(isinstance(v, Fraction) for v in u.values()) else float)
    for e, val in u.items():
        vec[index[e]] = val
    return vec


def integer_laplacian_apply(g: CellGraph, vec: np.ndarray) -> np.ndarray:
    """(deg f - sum of neighbours) in exact integer arithmetic."""
    A = g.adjacency
    out = np.empty(g.n, dtype=object)
    for i in range(g.n):
        nb = A.indices[A.indptr[i]:A.indptr[i + 1]]
        out[i] = int(g.degree[i]) * vec[i] - sum(vec[j] for j in nb)
    return out


# --- orthonormal translate basis of E6 ---------------------------------------

def e6_weight(a, b):
    """2 (3 - cos 2 pi a - cos 2 pi b - cos 2 pi (a - b))."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 2.0 * (3.0 - np.cos(TWO_PI * a) - np.cos(TWO_PI * b) - np.cos(TWO_PI * (a - b)))


def e6_fhat(a, b):
    """Positive Fourier profile with weight * fhat^2 = 1."""
    return 1.0 / np.sqrt(e6_weight(a, b))


_CORNERS = ((0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5))


def _duffy_integral(j, k, n, half=0.5):
    """int over [-half, half]^2 of cos(2 pi (a j + b k)) fhat(a, b) by Duffy triangles.

    The square is split into four triangles with apex at the singular point
    (0, 0). The map (s, tau) -> s ((1 - tau) P1 + tau P2) has Jacobian
    s |det(P1, P2)|, which cancels the 1/r singularity, and the smooth result
    is integrated with an n x n Gauss-Legendre rule.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * w
    S, T = np.meshgrid(s, s, indexing="ij")
    W = np.outer(ws, ws)
    total = 0.0
    corners = [(half * cx * 2, half * cy * 2) for cx, cy in _CORNERS]
    for i in range(4):
        p1 = np.array(corners[i])
        p2 = np.array(corners[(i + 1) % 4])
        det = abs(p1[0] * p2[1] - p1[1] * p2[0])
        A = S * ((1.0 - T) * p1[0] + T * p2[0])
        B = S * ((1.0 - T) * p1[1] + T * p2[1])
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.cos(TWO_PI * (A * j + B * k)) * S * det / np.sqrt(e6_weight(A, B))
        total += float(np.sum(W * vals))
    return total


def hex_E6_basis_coeff(j: int, k: int, resolution: int = 96, tol: float = 1e-10) -> float:
    """f~([j, k]) = int_0^1 int_0^1 e^{2 pi i (a j + b k)} fhat(a, b) da db.

    The value is real because the weight is even. Convergence is certified
    by comparing resolution n with 3n/2; ConvergenceError if they disagree.
    """
    n = max(int(resolution), abs(j) + abs(k) + 16)
    v1 = _duffy_integral(j, k, n)
    v2 = _duffy_integral(j, k, (3 * n) // 2)
    if abs(v1 - v2) > tol * max(1.0, abs(v2)):
        raise ConvergenceError(f"f~[{j},{k}] not converged: {v1} vs {v2}")
    return v2


def hex_E6_basis_table(radius: int, grid: int = 1024) -> np.ndarray:
    """Table T[j + radius, k + radius] = f~([j, k]) for |j|, |k| <= radius via FFT.

    The periodic integrand is sampled on a grid x grid lattice. The origin
    sample is replaced by the exact cell average of fhat (Duffy quadrature),
    which removes the singular cell error. Adding a constant to f~ does not
    change sum f~ psi_H, so remaining near-constant errors are harmless.
    """
    if grid <= 2 * radius + 2:
        raise ValueError("grid must exceed the table diameter")
    a = np.arange(grid) / grid
    A, B = np.meshgrid(a, a, indexing="ij")
    with np.errstate(divide="ignore"):
        Fh = e6_fhat(A, B)
    h = 1.0 / grid
    Fh[0, 0] = _duffy_integral(0, 0, 64, half=h / 2) / (h * h)
    T = np.fft.ifft2(Fh).real  # includes the 1/grid^2 factor and e^{+i ...}
    idx = np.arange(-radius, radius + 1) % grid
    return T[np.ix_(idx, idx)]


def translate_inner(table: np.ndarray, p: int, q: int, R: int) -> float:
    """Truncated <F, tau_{p,q} F> = sum over neighbouring pairs inside |j|,|k| <= R."""
    c = (table.shape[0] - 1) // 2
    need = R + 1 + max(abs(p), abs(q))
    if need > c:
        raise ValueError("table too small for this truncation radius")
    total = 0.0
    for dj, dk in ((1, 0), (0, 1), (1, -1)):
        js = np.arange(-R, R + 1)
        J, K = np.meshgrid(js, js, indexing="ij")
        J2, K2 = J + dj, K + dk
        ok = (np.abs(J2) <= R) & (np.abs(K2) <= R)
        f = lambda JJ, KK: table[JJ + c, KK + c]
        d0 = f(J, K) - f(J2, K2)
        d1 = f(J + p, K + q) - f(J2 + p, K2 + q)
        total += float(np.sum((d0 * d1)[ok]))
    return total


def lattice_inner(f: Mapping[tuple, float], g: Mapping[tuple, float], R: int | None = None) -> float:
    """sum over neighbouring hexagon pairs of (f - f')(g - g'), optionally truncated."""
    keys = set(f) | set(g)
    if R is None:
        R = max(max(abs(j), abs(k)) for j, k in keys) + 2
    total = 0.0
    for j in range(-R, R + 1):
        for k in range(-R, R + 1):
            for dj, dk in ((1, 0), (0, 1), (1, -1)):
                j2, k2 = j + dj, k + dk
                if abs(j2) > R or abs(k2) > R:
                    continue
                df = f.get((j, k), 0.0) - f.get((j2, k2), 0.0)
                dg = g.get((j, k), 0.0) - g.get((j2, k2), 0.0)
                total += df * dg
    return total


def fourier_inner(f: Mapping[tuple, float], g: Mapping[tuple, float], grid: int = 64) -> float:
    """int int e6_weight(a, b) fhat conj(ghat) da db on an exact trigonometric grid."""
    a = np.arange(grid) / grid
    A, B = np.meshgrid(a, a, indexing="ij")

    def hat(c):
        out = np.zeros_like(A, dtype=complex)
        for (j, k), val in c.items():
            out += val * np.exp(-2j * math.pi * (A * j + B * k))
        return out

    return float(np.mean(e6_weight(A, B) * hat(f) * np.conj(hat(g))).real)


# ---------------------------------------------------------------------------
# triangular-lattice fractal field

STATED_SIGMA0_FIELD = (0.0, 16.0 / 3.0)


def triangular_symbol(x, y):
    """Probabilistic Laplacian symbol 1 - (cos x + cos y + cos(x - y)) / 3."""
    return 1.0 - (np.cos(x) + np.cos(y) + np.cos(x - y)) / 3.0


def triangular_symbol_band(grid: int = 241) -> tuple[float, float]:
    """Range of the probabilistic symbol: dense grid then local refinement."""
    t = np.linspace(-math.pi, math.pi, grid)
    X, Y = np.meshgrid(t, t, indexing="ij")
    S = triangular_symbol(X, Y)
    out = []
    for sgn, pick in ((1.0, np.argmin), (-1.0, np.argmax)):
        i = np.unravel_index(pick(S), S.shape)
        res = optimize.minimize(lambda p: sgn * triangular_symbol(p[0], p[1]),
                                x0=[X[i], Y[i]], method="Nelder-Mead",
                                options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 4000})
        out.append(sgn * res.fun)
    return float(out[0]), float(out[1])


def generation_bands(band: tuple[float, float], max_len: int, m0: int = 0) -> list[tuple[float, float, int]]:
    """fR^{-1}(band) as intervals, one per canonical word, tagged by word length."""
    from .decimation import EigenvalueAddress, hi_terminated_words, resolve_address

    lo, hi = band
    out = []
    for word in hi_terminated_words(max_len):
        ends = []
        for y in (lo, hi):
            addr = EigenvalueAddress(m0=m0, seed=y, word=word)
            ends.append(resolve_address(addr))
        out.append((min(ends), max(ends), len(word)))
    return sorted(out)


def triangular_field_bands(cutoff: tuple[int, int] = (2, 3), sizes=(6, 12, 24)) -> dict:
    """Sigma0 for the triangular field computed two ways, with the fR^{-1} bands."""
    smin, smax = triangular_symbol_band()
    torus = {}
    for n in sizes:
        g = build_graph("tri_torus", m=n, n=n)
        w = brute_spectrum(g, "probabilistic").values
        torus[n] = {"min": float(w.min()), "max": float(w.max())}
    sigma0 = (4.0 * smin, 4.0 * smax)
    _, max_len = cutoff
    five_three = frak_R_preimages(GASKET, 3.0, max_len, m0=1)
    five_five = frak_R_preimages(GASKET, 5.0, max_len, m0=1)
    return {
        "symbol_band_probabilistic": (smin, smax),
        "torus_probabilistic": torus,
        "sigma0_computed": sigma0,
        "sigma0_stated": STATED_SIGMA0_FIELD,
        "bands": generation_bands(sigma0, max_len),
        "bands_stated": generation_bands(STATED_SIGMA0_FIELD, max_len),
        "points_5R3": five_three.tolist(),
        "points_5R5": five_five.tolist(),
    }
