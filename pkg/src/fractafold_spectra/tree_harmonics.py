"""Harmonic analysis on the 3-regular tree Gamma and its edge graph Gamma0.

Vertices of the infinite tree are addressed by tuples: the root is (), its
neighbours are (0,), (1,), (2,) and every other vertex v has children v + (0,)
and v + (1,). A vertex of Gamma0 (an edge of Gamma) is addressed by the label
of its endpoint farther from the root.

Infinite sums over the tree are evaluated exactly on the convex hull of the
relevant points. Every vertex off the hull sits in a binary branch hanging
from a hull vertex v, and all 2^(h-1) vertices at depth h of such a branch
see the hull through v, so radial expansions are constant on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy import integrate
from scipy.linalg import null_space
from scipy.sparse.csgraph import shortest_path

from .errors import ConvergenceError, PoleError
from .graph_core import CellGraph, build_graph, edge_graph, neg_laplacian_apply

LOG2 = math.log(2.0)
SQRT2 = math.sqrt(2.0)
BAND = (3.0 - 2.0 * SQRT2, 3.0 + 2.0 * SQRT2)
T_MAX = math.pi / LOG2


# ---------------------------------------------------------------------------
# parameters and closed forms

@dataclass(frozen=True)
class TreeParameter:
    """Spectral parameter t in [0, pi/log2] with z = 1/2 + it."""

    t: float

    @property
    def z(self) -> complex:
        return complex(0.5, self.t)

    @property
    def alpha(self) -> float:
        return self.t * LOG2

    @property
    def lam(self) -> float:
        return 3.0 - 2.0 * SQRT2 * math.cos(self.alpha)

    @classmethod
    def from_lambda(cls, lam: float) -> "TreeParameter":
        c = (3.0 - lam) / (2.0 * SQRT2)
        if c < -1.0 - 1e-12 or c > 1.0 + 1e-12:
            raise ValueError(f"lambda = {lam} lies outside the band {BAND}")
        return cls(math.acos(min(1.0, max(-1.0, c))) / LOG2)

    def interior(self) -> bool:
        return 0.0 < self.t < T_MAX


def as_param(p) -> TreeParameter:
    if isinstance(p, TreeParameter):
        return p
    return TreeParameter.from_lambda(float(p))


def lambda_of_z(z: complex) -> complex:
    """Eigenvalue 3 - 2^z - 2^(1-z) attached to phi_z."""
    return 3.0 - 2.0**z - 2.0 ** (1.0 - z)


def c_coeff(z: complex) -> complex:
    """c(z) = (1/3) (2^(1-z) - 2^(z-1)) / (2^-z - 2^(z-1))."""
    z = complex(z)
    if abs(2.0 ** (2.0 * z - 1.0) - 1.0) < 1e-14:
        raise PoleError(f"c(z) has a pole at z = {z}")
    return (2.0 ** (1.0 - z) - 2.0 ** (z - 1.0)) / (3.0 * (2.0**-z - 2.0 ** (z - 1.0)))


def phi_complex(z: complex, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return c_coeff(z) * 2.0 ** (-n * z) + c_coeff(1.0 - z) * 2.0 ** (-n * (1.0 - z))


def phi(param, n) -> np.ndarray:
    """Spherical function phi(n) on the critical line, in real trigonometric form."""
    p = as_param(param)
    n = np.abs(np.asarray(n, dtype=float)) if np.ndim(n) else abs(float(n))
    a = p.alpha
    if abs(math.sin(a)) < 1e-8:
        # band edge: use the complex form, shifted off the pole
        z = complex(0.5, p.t + (1e-9 if p.t < T_MAX / 2 else -1e-9))
        return np.real(phi_complex(z, n))
    n = np.asarray(n, dtype=float)
    return (3.0 * np.cos(n * a) + np.sin(n * a) / math.tan(a)) * 2.0 ** (-n / 2.0) / 3.0


def phi_signed(param, n) -> np.ndarray:
    """phi evaluated at signed n through the complex form (phi(-1) = phi(1) is a property)."""
    p = as_param(param)
    return np.real(phi_complex(p.z, n))


def c_tilde(z: complex) -> complex:
    return (2.0 + 2.0**-z + 2.0**z) * c_coeff(z)


def psi(param, n) -> np.ndarray:
    """psi(n) = 2 phi(n) + phi(n + 1) + phi(n - 1), using phi(-1) = phi(1)."""
    p = as_param(param)
    n = np.abs(np.asarray(n, dtype=float))
    return 2.0 * phi(p, n) + phi(p, n + 1.0) + phi(p, np.abs(n - 1.0))


def psi_complex(z: complex, n) -> np.ndarray:
    """psi_z(n) = c~(z) 2^(-nz) + c~(1-z) 2^(-n(1-z))."""
    n = np.asarray(n, dtype=float)
    return c_tilde(z) * 2.0 ** (-n * z) + c_tilde(1.0 - z) * 2.0 ** (-n * (1.0 - z))


def F6_profile(n) -> np.ndarray:
    return (-0.5) ** np.asarray(n, dtype=float) / math.sqrt(3.0)


def P6_profile(n) -> np.ndarray:
    return (-0.5) ** np.asarray(n, dtype=float) / 3.0


def b_lambda(param, form: str = "t") -> float:
    """b = 8 + 1/sin^2(t log 2) = 8(-l^2 + 6l)/(-l^2 + 6l - 1)."""
    p = as_param(param)
    if not p.interior():
        raise PoleError("b(lambda) is singular at the band edges")
    if form == "t":
        return 8.0 + 1.0 / math.sin(p.alpha) ** 2
    lam = p.lam
    q = -lam * lam + 6.0 * lam
    return 8.0 * q / (q - 1.0)


def dm_t(t) -> np.ndarray:
    """Density of dm with respect to dt: (log 2 / 3 pi) |c(1/2 + it)|^-2.

    With alpha = t log 2 one has |c|^2 = (1 + 8 sin^2 alpha) / (36 sin^2 alpha),
    so the density is 12 log 2 sin^2(alpha) / (pi (1 + 8 sin^2 alpha)).
    """
    s2 = np.sin(np.asarray(t, dtype=float) * LOG2) ** 2
    return 12.0 * LOG2 * s2 / (math.pi * (1.0 + 8.0 * s2))


def dm_t_from_c(t) -> np.ndarray:
    """Same density evaluated directly from c(z)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    c = np.array([abs(c_coeff(complex(0.5, tt))) for tt in t])
    return LOG2 / (3.0 * math.pi) / c**2


def dm_lambda(lam) -> np.ndarray:
    """Density of dm with respect to d(lambda): 3 sqrt(q - 1) / (2 pi q), q = -l^2 + 6l.

    This is the Kesten-McKay law of the 3-regular tree shifted to -Delta.
    """
    lam = np.asarray(lam, dtype=float)
    q = -lam * lam + 6.0 * lam
    return 3.0 * np.sqrt(np.maximum(q - 1.0, 0.0)) / (2.0 * math.pi * q)


def dlambda_dt(t) -> np.ndarray:
    return 2.0 * SQRT2 * LOG2 * np.sin(np.asarray(t, dtype=float) * LOG2)


# ---------------------------------------------------------------------------
# spectral measure quadrature

@dataclass
class MeasureGrid:
    """Quadrature nodes (in lambda and t) and weights for dm on the band."""

    t: np.ndarray
    weights: np.ndarray

    @property
    def lam(self) -> np.ndarray:
        return 3.0 - 2.0 * SQRT2 * np.cos(self.t * LOG2)

    @property
    def band(self) -> tuple[float, float]:
        return BAND

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights, values, axes=(0, 0))


def measure_grid(n: int = 64) -> MeasureGrid:
    """Gauss-Legendre rule in t. In t the density of dm is smooth and the
    square-root behaviour at the band edges disappears."""
    x, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * T_MAX * (x + 1.0)
    return MeasureGrid(t=t, weights=0.5 * T_MAX * w * dm_t(t))


def integrate_dm(g: Callable[[float], float], tol: float = 1e-12, limit: int = 200) -> tuple[float, float]:
    """Integrate g(lambda) dm(lambda) with adaptive Gauss-Kronrod panels.

    The endpoint factor sqrt((l - a)(b - l)) is passed to QUADPACK as an
    algebraic weight so the square-root edges are integrated exactly.
    """
    a, b = BAND

    def smooth(lam):
        return g(lam) * 3.0 / (2.0 * math.pi * (-lam * lam + 6.0 * lam))

    val, err = integrate.quad(smooth, a, b, weight="alg", wvar=(0.5, 0.5),
                              epsabs=tol, epsrel=tol, limit=limit)
    return val, err


def cumulative_dm(lam) -> np.ndarray:
    """m([a, lambda]) for lambda in the band."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.empty_like(lam)
    for i, l in enumerate(lam):
        t = TreeParameter.from_lambda(min(max(l, BAND[0]), BAND[1])).t
        out[i] = integrate.quad(dm_t, 0.0, t, epsabs=1e-14, epsrel=1e-13)[0]
    return out


# ---------------------------------------------------------------------------
# tree addressing

def _common_prefix(x: tuple, y: tuple) -> int:
    p = 0
    for a, b in zip(x, y):
        if a != b:
            break
        p += 1
    return p


def tree_distance(x: tuple, y: tuple) -> int:
    p = _common_prefix(x, y)
    return len(x) + len(y) - 2 * p


def edge_endpoints(e: tuple) -> tuple[tuple, tuple]:
    if not e:
        raise ValueError("the root is not an edge label")
    return e[:-1], e


def vertex_edge_distance(v: tuple, e: tuple) -> int:
    a, b = edge_endpoints(e)
    return min(tree_distance(v, a), tree_distance(v, b))


def edge_distance(e1: tuple, e2: tuple) -> int:
    """Graph distance in Gamma0 between two edges of the tree."""
    if e1 == e2:
        return 0
    a, b = edge_endpoints(e1)
    return min(vertex_edge_distance(a, e2), vertex_edge_distance(b, e2)) + 1


def tree_neighbors(v: tuple) -> list[tuple]:
    out = [v[:-1]] if v else []
    out += [v + (c,) for c in ((0, 1, 2) if not v else (0, 1))]
    return out


def path_to(x: tuple, y: tuple) -> list[tuple]:
    """Vertices on the geodesic from x to y, both included."""
    p = _common_prefix(x, y)
    up = [x[:k] for k in range(len(x), p - 1, -1)]
    down = [y[:k] for k in range(p + 1, len(y) + 1)]
    return up + down


def convex_hull(points: Iterable[tuple]) -> list[tuple]:
    pts = list(points)
    if not pts:
        return []
    root = pts[0]
    hull = set()
    for q in pts:
        hull.update(path_to(q, root))
    return sorted(hull, key=lambda v: (len(v), v))


def walk_away(v: tuple, first: tuple, depth: int) -> list[tuple]:
    """A concrete path v -> first -> ... of the given length moving away from v."""
    path = [v, first]
    while len(path) <= depth:
        prev, cur = path[-2], path[-1]
        nxt = [w for w in tree_neighbors(cur) if w != prev]
        path.append(nxt[0])
    return path


# ---------------------------------------------------------------------------
# radial expansions and the hull engine

@dataclass
class RadialExpansion:
    """Finite combination sum_j a_j p(d(x, c_j)) on Gamma or Gamma0."""

    level: str
    centers: list
    coeffs: np.ndarray
    profile: Callable
    decay: float

    def __post_init__(self):
        if self.level not in ("Gamma", "Gamma0"):
            raise ValueError("level must be Gamma or Gamma0")
        self.centers = [tuple(c) for c in self.centers]
        self.coeffs = np.asarray(self.coeffs, dtype=float)

    def dist(self, x: tuple, c: tuple) -> int:
        return tree_distance(x, c) if self.level == "Gamma" else edge_distance(x, c)

    def __call__(self, x: tuple) -> float:
        d = np.array([self.dist(tuple(x), c) for c in self.centers])
        return float(self.coeffs @ self.profile(d))

    def evaluate(self, points: Iterable[tuple]) -> np.ndarray:
        return np.array([self(p) for p in points])

    def hull_points(self) -> list[tuple]:
        if self.level == "Gamma":
            return list(self.centers)
        return [q for c in self.centers for q in edge_endpoints(c)]

    def scaled(self, s: float) -> "RadialExpansion":
        return RadialExpansion(self.level, self.centers, s * self.coeffs, self.profile, self.decay)


class HullSum:
    """Exact evaluation of sum_x f(x) g(x) over a ball (or all) of the tree.

    f and g are RadialExpansions on the same level; x0 is the base point of
    the ball (a vertex for Gamma, an edge label for Gamma0).
    """

    def __init__(self, f: RadialExpansion, g: RadialExpansion, x0: tuple):
        if f.level != g.level:
            raise ValueError("expansions live on different graphs")
        self.level = f.level
        self.f, self.g, self.x0 = f, g, tuple(x0)
        pts = f.hull_points() + g.hull_points()
        pts += [self.x0] if self.level == "Gamma" else list(edge_endpoints(self.x0))
        # root the hull computation at the base point
        pts = [pts[-1]] + pts
        self.hull = convex_hull(pts)
        self.hull_set = set(self.hull)

    @cached_property
    def _slots(self):
        return {v: [w for w in tree_neighbors(v) if w not in self.hull_set] for v in self.hull}

    def _dist_to_center(self, exp: RadialExpansion, v: tuple) -> np.ndarray:
        if self.level == "Gamma":
            return np.array([tree_distance(v, c) for c in exp.centers])
        return np.array([vertex_edge_distance(v, c) for c in exp.centers])

    def _hull_elements(self):
        if self.level == "Gamma":
            return list(self.hull)
        return [v for v in self.hull if v and v[:-1] in self.hull_set]

    def sum(self, N: int | None = None, depth_cap: int = 4000, tol: float = 1e-17):
        """Return (value, tail_bound). N=None sums the whole tree."""
        f, g = self.f, self.g
        total = 0.0
        for x in self._hull_elements():
            dx0 = tree_distance(x, self.x0) if self.level == "Gamma" else edge_distance(x, self.x0)
            if N is None or dx0 <= N:
                total += f(x) * g(x)
        tail = 0.0
        ratio = 2.0 * f.decay * g.decay
        for v in self.hull:
            nslots = len(self._slots[v])
            if nslots == 0:
                continue
            df = self._dist_to_center(f, v)
            dg = self._dist_to_center(g, v)
            if self.level == "Gamma":
                dv0 = tree_distance(v, self.x0)
            else:
                dv0 = vertex_edge_distance(v, self.x0)
            if N is None:
                hmax = self._infinite_depth(f, g, df, dg, tol, depth_cap)
            else:
                hmax = N - dv0
            if hmax < 1:
                continue
            h = np.arange(1, hmax + 1, dtype=float)
            # fold sqrt(2^(h-1)) into both factors to avoid overflow
            w = 2.0 ** ((h - 1.0) / 2.0)
            fv = (f.profile(h[:, None] + df[None, :]) * w[:, None]) @ f.coeffs
            gv = (g.profile(h[:, None] + dg[None, :]) * w[:, None]) @ g.coeffs
            terms = fv * gv
            total += nslots * float(terms.sum())
            if N is None:
                if ratio >= 1.0:
                    raise ConvergenceError("infinite sum of non-square-summable profiles")
                tail += nslots * abs(terms[-1]) * ratio / (1.0 - ratio)
        return total, tail

    @staticmethod
    def _infinite_depth(f, g, df, dg, tol, cap):
        ratio = 2.0 * f.decay * g.decay
        if ratio >= 1.0:
            raise ConvergenceError("infinite sum of non-square-summable profiles")
        scale = (np.abs(f.coeffs).sum() + 1e-300) * (np.abs(g.coeffs).sum() + 1e-300)
        depth = int(math.ceil(math.log(tol / scale) / math.log(ratio))) + 4 if scale > tol else 4
        return int(min(max(depth, 4), cap))

    def sphere_counts(self, N: int) -> np.ndarray:
        """Number of elements at each distance 0..N from x0 (oracle for the engine)."""
        counts = np.zeros(N + 1, dtype=np.int64)
        for x in self._hull_elements():
            dx0 = tree_distance(x, self.x0) if self.level == "Gamma" else edge_distance(x, self.x0)
            if dx0 <= N:
                counts[dx0] += 1
        for v in self.hull:
            dv0 = tree_distance(v, self.x0) if self.level == "Gamma" else vertex_edge_distance(v, self.x0)
            for h in range(1, N - dv0 + 1):
                counts[dv0 + h] += len(self._slots[v]) * 2 ** (h - 1)
        return counts


def l2_inner(f: RadialExpansion, g: RadialExpansion) -> tuple[float, float]:
    """Exact l^2 inner product of two square-summable expansions and a tail bound."""
    x0 = f.centers[0]
    return HullSum(f, g, x0).sum(None)


# ---------------------------------------------------------------------------
# kernels

def kernel_profile(level: str, param, normalization: str = "resolution") -> Callable:
    """Radial profile of the spectral projection kernel at lambda.

    Gamma: phi(d). Gamma0: psi(d)/(6 - lambda), which is the kernel
    (1/(6 - lambda)) S1 P S2 and integrates against dm to I - P6.
    normalization="third" divides the Gamma0 profile by 3, the form in which
    the modified-mean limits b/162 and the constant 36/b are stated.
    """
    p = as_param(param)
    if level == "Gamma":
        return lambda n: phi(p, n)
    if level == "Gamma0":
        scale = {"resolution": 1.0, "third": 1.0 / 3.0}[normalization]
        lam = p.lam
        return lambda n: scale * psi(p, n) / (6.0 - lam)
    raise ValueError(f"unknown level {level!r}")


def kernel_eval(level: str, param, x: tuple, y: tuple, normalization: str = "resolution") -> float:
    p = as_param(param)
    if not p.interior():
        raise ValueError("lambda must lie in the open band")
    d = tree_distance(x, y) if level == "Gamma" else edge_distance(x, y)
    return float(kernel_profile(level, p, normalization)(d))


def projected(level: str, param, data: Mapping[tuple, float],
              normalization: str = "resolution") -> RadialExpansion:
    """P_lambda f (or the Gamma0 analogue) for finitely supported f as an expansion."""
    p = as_param(param)
    centers = list(data.keys())
    return RadialExpansion(level, centers, np.array([data[c] for c in centers]),
                           kernel_profile(level, p, normalization), decay=2 ** -0.5)


def delta_expansion(level: str, data: Mapping[tuple, float]) -> RadialExpansion:
    centers = list(data.keys())
    return RadialExpansion(level, centers, np.array([data[c] for c in centers]),
                           lambda n: (np.asarray(n) == 0).astype(float), decay=0.0)


def frame_vector(z: tuple) -> RadialExpansion:
    """F_z(x) = (1/sqrt 3)(-1/2)^d(x, z) on Gamma0."""
    return RadialExpansion("Gamma0", [tuple(z)], np.array([1.0]), F6_profile, decay=0.5)


def frame_combination(data: Mapping[tuple, float]) -> RadialExpansion:
    centers = list(data.keys())
    return RadialExpansion("Gamma0", centers, np.array([data[c] for c in centers]),
                           F6_profile, decay=0.5)


def project_E6(data: Mapping[tuple, float]) -> RadialExpansion:
    """Orthogonal projection onto the 6-eigenspace: kernel (1/3)(-1/2)^d."""
    centers = list(data.keys())
    return RadialExpansion("Gamma0", centers, np.array([data[c] for c in centers]),
                           P6_profile, decay=0.5)


def edge_at_distance(d: int) -> tuple:
    """An edge label at Gamma0 distance d from the edge (0,)."""
    return (0,) + (0,) * d


def frame_gram(dmax: int) -> np.ndarray:
    """G(d) = <F_z, F_y> for d(z, y) = d, each by exact summation over Gamma0.

    The automorphisms of the tree act transitively on pairs of edges at a
    given distance, so one pair per distance suffices.
    """
    return np.array([l2_inner(frame_vector((0,)), frame_vector(edge_at_distance(d)))[0]
                     for d in range(dmax + 1)])


def frame_sum(F: RadialExpansion, radius: int = 30) -> dict:
    """sum_z |<F, F_z>|^2 over z within `radius` of the hull of F, plus a tail bound.

    Inner products <F, F_z> come from the exactly summed Gram table. z off the
    hull is grouped by (hull vertex, free slot, depth), on which the inner
    product is constant; the remaining terms decay geometrically with ratio
    2 * (1/2)^2 = 1/2, so the last included term bounds the tail.
    """
    norm2, norm_tail = l2_inner(F, F)
    hull = convex_hull(F.hull_points())
    hull_set = set(hull)
    spread = max(edge_distance(a, b) for a in F.centers for b in F.centers)
    gram = frame_gram(radius + spread + len(hull) + 2)

    def coupling(z):
        d = np.array([edge_distance(z, c) for c in F.centers])
        return float(F.coeffs @ gram[d])

    total = 0.0
    for e in hull:
        if e and e[:-1] in hull_set:
            total += coupling(e) ** 2
    tail = 0.0
    for v in hull:
        for first in tree_neighbors(v):
            if first in hull_set:
                continue
            path = walk_away(v, first, radius)
            last = 0.0
            for h in range(1, radius + 1):
                a, b = path[h - 1], path[h]
                z = b if len(b) > len(a) else a
                last = coupling(z) ** 2 * 2.0 ** (h - 1)
                total += last
            tail += last
    return {"sum": total, "norm2": norm2, "tail": tail + 3.0 * norm_tail,
            "relative_error": abs(total - 3.0 * norm2) / norm2}


# ---------------------------------------------------------------------------
# modified mean inner product and Plancherel

def mean_inner(f: RadialExpansion, g: RadialExpansion, N: int, x0: tuple | None = None) -> float:
    """(1/N) sum_{d(x, x0) <= N} f(x) g(x)."""
    if x0 is None:
        x0 = () if f.level == "Gamma" else (0,)
    val, _ = HullSum(f, g, x0).sum(N)
    return val / N


def plancherel_sides(level: str, data: Mapping[tuple, float], param, N: int,
                     x0: tuple | None = None, normalization: str = "third") -> tuple[float, float]:
    """LHS <P f, f> and RHS C b^-1 <P f, P f>_M of the modified-mean Plancherel formula.

    C = 12 on Gamma. On Gamma0, C = 36 for the "third" normalization of the
    kernel and C = 12 for the resolution normalization.
    """
    p = as_param(param)
    Pf = projected(level, p, data, normalization if level == "Gamma0" else "resolution")
    centers = list(data.keys())
    a = np.array([data[c] for c in centers])
    lhs = float(sum(a[i] * Pf(centers[i]) for i in range(len(centers))))
    if level == "Gamma":
        C = 12.0
    else:
        C = 36.0 if normalization == "third" else 12.0
    rhs = C / b_lambda(p) * mean_inner(Pf, Pf, N, x0)
    return lhs, rhs


def plancherel_residual(level: str, data: Mapping[tuple, float], param, N: int,
                        x0: tuple | None = None, normalization: str = "third") -> float:
    lhs, rhs = plancherel_sides(level, data, param, N, x0, normalization)
    return abs(lhs - rhs)


def mean_norm_limit(level: str, param) -> float:
    """Limits b/12 (Gamma, delta) and b/162 (Gamma0, delta, "third" normalization)."""
    b = b_lambda(param)
    return b / 12.0 if level == "Gamma" else b / 162.0


# ---------------------------------------------------------------------------
# finite balls, resolvents and the resolution of identity

class TreeBall:
    """Radius-r ball of Gamma with its edge graph and label maps."""

    def __init__(self, radius: int):
        self.radius = radius
        self.gamma: CellGraph = build_graph("tree_ball", radius=radius)
        self.gamma0: CellGraph = edge_graph(self.gamma)
        self.labels = self.gamma.labels
        self.index = self.gamma.label_index
        # child endpoint label of each Gamma0 vertex
        self.edge_labels = [b if len(b) > len(a) else a for a, b in self.gamma0.labels]
        self.edge_index = {e: i for i, e in enumerate(self.edge_labels)}
        self.depth = np.array([len(v) for v in self.labels])
        self.edge_depth = np.array([len(e) for e in self.edge_labels])

    def graph(self, level: str) -> CellGraph:
        return self.gamma if level == "Gamma" else self.gamma0

    def idx(self, level: str, label: tuple) -> int:
        return self.index[tuple(label)] if level == "Gamma" else self.edge_index[tuple(label)]

    def distances(self, level: str, sources: list[int]) -> np.ndarray:
        g = self.graph(level)
        return shortest_path(g.adjacency, unweighted=True, indices=sources).astype(np.int64)

    def inner_mask(self, level: str, radius: int) -> np.ndarray:
        d = self.depth if level == "Gamma" else self.edge_depth
        return d <= radius

    def evaluate(self, level: str, data: Mapping[tuple, float], profile: Callable) -> np.ndarray:
        labels = list(data.keys())
        D = self.distances(level, [self.idx(level, c) for c in labels])
        out = np.zeros(D.shape[1], dtype=complex if _is_complex(profile) else float)
        for i, c in enumerate(labels):
            out = out + data[c] * profile(D[i])
        return out


def _is_complex(profile) -> bool:
    return bool(np.iscomplexobj(profile(np.array([0]))))


def kernel_residual(ball: TreeBall, level: str, param, y_labels: list[tuple],
                    normalization: str = "resolution") -> float:
    """max |(-Delta - lambda) P(., y)| over interior vertices of the ball."""
    p = as_param(param)
    prof = kernel_profile(level, p, normalization)
    g = ball.graph(level)
    D = ball.distances(level, [ball.idx(level, y) for y in y_labels])
    K = prof(D.T)
    R = neg_laplacian_apply(g, K) - p.lam * K
    return float(np.abs(R[g.interior]).max())


def resolvent_scalar(level: str, z: complex) -> complex:
    if level == "Gamma":
        return 1.0 / (2.0**-z - 2.0**z)
    den = 2.0 * 2.0**-z - 2.0**z - 1.0
    if abs(den) < 1e-14:
        raise PoleError("Gamma0 resolvent pole (lambda = 6)")
    return 1.0 / den


def resolvent_apply(ball: TreeBall, level: str, z: complex, data: Mapping[tuple, float]) -> np.ndarray:
    """(lambda I + Delta)^{-1} f on the ball for lambda = 3 - 2^z - 2 2^-z, Re z > 1/2."""
    z = complex(z)
    if z.real <= 0.5:
        raise ValueError("the resolvent formula needs Re z > 1/2")
    scale = resolvent_scalar(level, z)
    return scale * ball.evaluate(level, data, lambda d: 2.0 ** (-z * np.asarray(d, dtype=float)))


def lambda_resolvent(z: complex) -> complex:
    return 3.0 - 2.0**z - 2.0 * 2.0**-z


def distance_integrals(level: str, dmax: int, method: str = "quad", n: int = 64,
                       tol: float = 1e-12) -> np.ndarray:
    """I(d) = int K_lambda(d) dm(lambda) for d = 0..dmax."""
    ds = np.arange(dmax + 1)
    if method == "quad":
        out = np.empty(dmax + 1)
        for d in ds:
            if level == "Gamma":
                fn = lambda lam, d=d: float(phi(TreeParameter.from_lambda(lam), d))
            else:
                fn = lambda lam, d=d: float(psi(TreeParameter.from_lambda(lam), d)) / (6.0 - lam)
            out[d] = integrate_dm(fn, tol=tol)[0]
        return out
    if method == "gauss":
        grid = measure_grid(n)
        vals = []
        for t in grid.t:
            p = TreeParameter(float(t))
            vals.append(kernel_profile(level, p)(ds))
        return grid.integrate(np.array(vals))
    raise ValueError(f"unknown method {method!r}")


def resolve_identity(ball: TreeBall, level: str, data: Mapping[tuple, float],
                     method: str = "quad", n: int = 64) -> np.ndarray:
    """int P_lambda f dm evaluated on every vertex of the ball."""
    g = ball.graph(level)
    D = ball.distances(level, [ball.idx(level, c) for c in data])
    I = distance_integrals(level, int(D.max()), method=method, n=n)
    out = np.zeros(g.n)
    for i, c in enumerate(data):
        out += data[c] * I[D[i]]
    return out


def project_E6_on_ball(ball: TreeBall, data: Mapping[tuple, float]) -> np.ndarray:
    return ball.evaluate("Gamma0", data, P6_profile)


# ---------------------------------------------------------------------------
# compactly supported 5-eigenfunctions on refined tree meshes

@dataclass
class FiveSeriesResult:
    basis: np.ndarray
    patch: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def five_series_search(g: CellGraph, center: int, support_radius: int,
                       rcond: float = 1e-10) -> FiveSeriesResult:
    """Null space of (-Delta - 5) among functions supported within support_radius of center.

    The eigen-equation is imposed on the patch and on every vertex adjacent
    to it, so returned vectors are genuine compactly supported eigenfunctions.
    """
    d = shortest_path(g.adjacency, unweighted=True, indices=[center])[0]
    patch = np.flatnonzero(d <= support_radius)
    rows = np.flatnonzero(d <= support_radius + 1)
    if np.any(g.boundary[rows]):
        raise ValueError("patch touches the truncation boundary; use a larger mesh")
    L = g.laplacian().toarray()
    A = (L - 5.0 * np.eye(g.n))[np.ix_(rows, patch)]
    Z = null_space(A, rcond=rcond)
    basis = np.zeros((g.n, Z.shape[1]))
    basis[patch] = Z
    res = float(np.abs(L @ basis - 5.0 * basis).max()) if Z.shape[1] else 0.0
    return FiveSeriesResult(basis=basis, patch=patch, residual=res)


def tree_mesh(radius: int, level: int) -> CellGraph:
    """refine^level(edge_graph(tree_ball(radius)))."""
    from .graph_core import refine

    g = edge_graph(build_graph("tree_ball", radius=radius))
    for _ in range(level):
        g = refine(g)
    return g
