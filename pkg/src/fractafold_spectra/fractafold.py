"""Fractafold-level objects: refinement meshes over Gamma0, eigenfunction
extension, the localized blocks psi_v, the extension operator Psi and its
adjoint, the projection kernel, spectrum sandwiches and a brute-force
decimation check.

Eigenvalues at level m refer to the graph Laplacian of the 4-regular level-m
graph (prob4 on graphs with boundary corners, which coincides with the graph
Laplacian at every degree-4 vertex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .decimation import (
    GASKET, INTERVAL, Branch, EigenvalueAddress, enumerate_series, frak_R_inverse_of_set,
    frak_R_preimages, inverse_branches, julia_backward_orbit,
)
from .errors import AdmissibilityError, ForbiddenEigenvalueError, GraphError, SizeCapError
from .graph_core import CellGraph, DENSE_CAP, brute_spectrum, cluster_eigenvalues, refine

FORBIDDEN = (2.0, 5.0, 6.0)
FORBIDDEN_TOL = 1e-12
VARIANT = "prob4"


# ---------------------------------------------------------------------------
# mesh

def vertex_weights(g: CellGraph, level: int) -> np.ndarray:
    """Per-vertex measure: incident cell mass 3^-level summed and divided by 3.

    This is the single place where the junction weighting is fixed; a vertex
    shared by two cells receives one third of each.
    """
    w = np.zeros(g.n)
    np.add.at(w, g.cells.ravel(), 3.0 ** (-level) / 3.0)
    return w


class FractafoldMesh:
    """Gamma0 together with its refinements Gamma_1 .. Gamma_n."""

    def __init__(self, base: CellGraph, level: int):
        if base.role != "Gamma0" or len(base.cells) == 0:
            raise GraphError("mesh base must be a Gamma0 graph with triangle cells")
        if level < 0:
            raise ValueError("level must be nonnegative")
        self.base = base
        self.level = level
        graphs = [base]
        for _ in range(level):
            graphs.append(refine(graphs[-1]))
        self.graphs: list[CellGraph] = graphs

    @property
    def fine(self) -> CellGraph:
        return self.graphs[-1]

    @property
    def n0(self) -> int:
        return self.base.n

    def weights(self, m: int | None = None) -> np.ndarray:
        m = self.level if m is None else m
        return vertex_weights(self.graphs[m], m)

    def cell_parent(self, m: int, cell: int) -> int:
        """Index of the level-(m-1) cell containing a level-m cell."""
        if m < 1:
            raise ValueError("level-0 cells have no parent")
        return cell // 3

    def cell_root(self, m: int, cell: int) -> int:
        return cell // 3**m

    def cell_address(self, m: int, cell: int) -> tuple[int, ...]:
        """(level-0 cell, child digit at level 1, ..., child digit at level m)."""
        digits = []
        for _ in range(m):
            digits.append(cell % 3)
            cell //= 3
        return (cell,) + tuple(reversed(digits))

    def cells_of_vertex(self, v: int, m: int = 0) -> np.ndarray:
        return np.flatnonzero(np.any(self.graphs[m].cells == v, axis=1))

    def laplacian(self, m: int | None = None) -> sp.csr_matrix:
        m = self.level if m is None else m
        return self.graphs[m].laplacian(VARIANT)


# ---------------------------------------------------------------------------
# local extension

@dataclass(frozen=True)
class ExtensionSystem:
    """Eigen-equation at the midpoints p, q, r of a cell given corner values a, b, c."""

    lam: float

    @property
    def matrix(self) -> np.ndarray:
        d = 4.0 - self.lam
        return np.array([[d, -1.0, -1.0], [-1.0, d, -1.0], [-1.0, -1.0, d]])

    @property
    def rhs_map(self) -> np.ndarray:
        # rows p, q, r opposite a, b, c; each midpoint sees the two other corners
        return np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def junction_factor(self) -> float:
        """Factor 6 - lambda multiplying the decimated equation at old vertices."""
        return 6.0 - self.lam

    def is_forbidden(self, tol: float = FORBIDDEN_TOL) -> bool:
        return any(abs(self.lam - f) <= tol for f in FORBIDDEN)

    def coefficients(self) -> np.ndarray:
        """3x3 map from corner values (a, b, c) to midpoint values (p, q, r)."""
        if self.is_forbidden():
            raise ForbiddenEigenvalueError(f"lambda = {self.lam} is forbidden")
        return sla.solve(self.matrix, self.rhs_map)


def extension_matrix(g: CellGraph, fine: CellGraph, lam: float) -> sp.csr_matrix:
    """Sparse |V_{m+1}| x |V_m| map u -> extended u at eigenvalue lam."""
    if fine.refined_from is not g:
        raise GraphError("fine graph is not the refinement of g")
    C = ExtensionSystem(lam).coefficients()
    cells = g.cells
    rows = [np.arange(g.n)]
    cols = [np.arange(g.n)]
    vals = [np.ones(g.n)]
    for i in range(3):
        for j in range(3):
            rows.append(fine.midpoints[:, i])
            cols.append(cells[:, j])
            vals.append(np.full(len(cells), C[i, j]))
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(fine.n, g.n))


def extend_eigenfunction(mesh: FractafoldMesh, u, lambda_next: float, m: int = 0,
                         check: bool = True) -> np.ndarray:
    """Extend u on V_m to V_{m+1} so that the eigen-equation at lambda_next
    holds at every new vertex.
    """
    if not 0 <= m < mesh.level:
        raise ValueError("m must be a level below the mesh level")
    g, fine = mesh.graphs[m], mesh.graphs[m + 1]
    E = extension_matrix(g, fine, lambda_next)
    w = E @ np.asarray(u)
    if check:
        new = np.arange(g.n, fine.n)
        res = (fine.laplacian(VARIANT) @ w - lambda_next * w)[new]
        scale = max(1.0, float(np.abs(w).max()))
        if res.size and np.abs(res).max() > 1e-12 * scale:
            raise ForbiddenEigenvalueError(f"local solve residual {np.abs(res).max():.2e}")
    return w


def eigen_residual(g: CellGraph, w, lam: float, mask: np.ndarray | None = None) -> float:
    r = g.laplacian(VARIANT) @ w - lam * np.asarray(w)
    if mask is not None:
        r = r[mask]
    return float(np.abs(r).max()) if r.size else 0.0


# ---------------------------------------------------------------------------
# interval variant

def interval_sine(N: int, k: int) -> tuple[float, np.ndarray]:
    """Dirichlet eigenpair sin(pi k j / N) of the path with N intervals."""
    j = np.arange(N + 1)
    return 2.0 - 2.0 * math.cos(math.pi * k / N), np.sin(math.pi * k * j / N)


def interval_extend(u, lambda_next: float) -> np.ndarray:
    """Halve every interval; midpoint value (u_x + u_y)/(2 - lambda_next)."""
    u = np.asarray(u, dtype=float)
    if abs(lambda_next - 2.0) <= FORBIDDEN_TOL:
        raise ForbiddenEigenvalueError("lambda = 2 is forbidden for the interval")
    out = np.empty(2 * len(u) - 1)
    out[0::2] = u
    out[1::2] = (u[:-1] + u[1:]) / (2.0 - lambda_next)
    return out


def interval_norm2(u) -> float:
    """Trapezoid squared norm with cell mass 1/(#intervals)."""
    u = np.asarray(u, dtype=float)
    h = 1.0 / (len(u) - 1)
    return float(h * (np.sum(u * u) - 0.5 * (u[0] ** 2 + u[-1] ** 2)))


def level_norm_ratios(lam0: float, u0, steps: int, word: Sequence[Branch] = (),
                      mesh: FractafoldMesh | None = None) -> list[tuple[float, float, float]]:
    """(lambda_m, measured ratio ||u_{m-1}||^2/||u_m||^2, factor(lambda_m)) per level.

    With mesh=None u0 lives on the interval (Dirichlet path); otherwise on mesh.base.
    """
    poly = INTERVAL if mesh is None else GASKET
    addr = EigenvalueAddress(m0=0, seed=lam0, word=tuple(word), poly=poly)
    lams = addr.lambda_sequence(steps)
    out = []
    u = np.asarray(u0, dtype=float)
    if mesh is None:
        prev = interval_norm2(u)
    else:
        prev = float(np.sum(mesh.weights(0) * u * u))
    for m in range(1, steps + 1):
        lam = float(lams[m])
        if mesh is None:
            u = interval_extend(u, lam)
            cur = interval_norm2(u)
        else:
            u = extend_eigenfunction(mesh, u, lam, m - 1)
            cur = float(np.sum(mesh.weights(m) * u * u))
        out.append((lam, prev / cur, float(poly.norm_factor(lam))))
        prev = cur
    return out


# ---------------------------------------------------------------------------
# psi_v, Psi and the kernel

def address_levels(addr: EigenvalueAddress, n: int) -> np.ndarray:
    """lambda_1 .. lambda_n for an address, checked for admissibility."""
    lams = addr.lambda_sequence(n)[1:]
    for m, lam in enumerate(lams, start=1):
        if any(abs(lam - f) <= FORBIDDEN_TOL for f in FORBIDDEN):
            raise AdmissibilityError(f"lambda_{m} = {lam} is forbidden; address lies in Sigma_ext")
    return lams


def Psi_matrix(mesh: FractafoldMesh, addr: EigenvalueAddress) -> sp.csr_matrix:
    """|V_n| x |V_0| matrix whose column v is psi_v at level n."""
    lams = address_levels(addr, mesh.level)
    P = sp.identity(mesh.n0, format="csr")
    for m, lam in enumerate(lams):
        P = extension_matrix(mesh.graphs[m], mesh.graphs[m + 1], float(lam)) @ P
    return P.tocsr()


def psi_v_lambda(mesh: FractafoldMesh, v: int, addr: EigenvalueAddress) -> np.ndarray:
    e = np.zeros(mesh.n0)
    e[v] = 1.0
    return Psi_matrix(mesh, addr) @ e


def Psi_lambda_apply(mesh: FractafoldMesh, f0, addr: EigenvalueAddress) -> np.ndarray:
    return Psi_matrix(mesh, addr) @ np.asarray(f0)


def Psi_adjoint(mesh: FractafoldMesh, g, addr: EigenvalueAddress) -> np.ndarray:
    """(Psi* g)(v) = sum_x w_x g(x) psi_v(x) with the level-n mesh measure."""
    return Psi_matrix(mesh, addr).T @ (mesh.weights() * np.asarray(g))


def harmonic_spline(mesh: FractafoldMesh, v: int) -> np.ndarray:
    """Discrete harmonic function on V_n with boundary data delta_v on V_0."""
    g = mesh.fine
    L = g.laplacian(VARIANT).tocsc()
    b = np.arange(mesh.n0)
    i = np.arange(mesh.n0, g.n)
    data = np.zeros(mesh.n0)
    data[v] = 1.0
    out = np.zeros(g.n)
    out[b] = data
    if i.size:
        from scipy.sparse.linalg import spsolve
        out[i] = spsolve(L[i][:, i], -L[i][:, b] @ data)
    return out


def partial_M(addr: EigenvalueAddress, n: int) -> float:
    """prod_{m=1}^{n} factor(lambda_m); tends to M(lambda) as n grows."""
    lams = address_levels(addr, n)
    return float(np.prod([addr.poly.norm_factor(x) for x in lams]))


def fractafold_kernel(mesh: FractafoldMesh, addr: EigenvalueAddress, P_Gamma0,
                      x=None, y=None, M: float | None = None, weight0: float | None = None):
    """P(lambda, x, y) = (M / w0) sum_{u,v} psi_v(x) psi_u(y) P_Gamma0(u, v).

    P_Gamma0 is a |V_0| x |V_0| array or a callable (u, v) -> value. M
    defaults to the level-n partial product, which makes the kernel an exact
    orthogonal projection on the level-n mesh. w0 is the level-0 vertex
    weight (2/3 for interior vertices); pass weight0=1 for the bare formula.
    Returns the full matrix when x and y are None.
    """
    if P_Gamma0 is None:
        raise ValueError("a Gamma0 kernel is required")
    if callable(P_Gamma0):
        K0 = np.array([[P_Gamma0(u, v) for v in range(mesh.n0)] for u in range(mesh.n0)])
    else:
        K0 = np.asarray(P_Gamma0)
    if K0.shape != (mesh.n0, mesh.n0):
        raise ValueError("Gamma0 kernel has the wrong shape")
    Psi = Psi_matrix(mesh, addr)
    M = partial_M(addr, mesh.level) if M is None else M
    w0 = 2.0 / 3.0 if weight0 is None else weight0
    rows = Psi if x is None else Psi[np.atleast_1d(x)]
    cols = Psi if y is None else Psi[np.atleast_1d(y)]
    K = (M / w0) * (rows @ (cols @ K0.T).T)
    K = np.asarray(K)
    if x is not None and y is not None and np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(K[0, 0])
    return K


def gamma0_projector(g0: CellGraph, mu: float, tol: float = 1e-8) -> np.ndarray:
    """Orthogonal projector onto the mu-eigenspace of Gamma0."""
    sp_ = brute_spectrum(g0, VARIANT)
    # prob4 vectors are degree-weighted; orthonormalize in counting measure
    V = sla.orth(sp_.vectors[:, np.abs(sp_.values - mu) <= tol])
    return V @ V.T


# ---------------------------------------------------------------------------
# spectrum description

@dataclass
class SpectrumReport:
    bands: list[tuple[float, float, int]]
    points: list[dict]
    lower: dict
    upper: dict
    cutoff: tuple[int, int]
    barlow_perkins: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "bands": [[lo, hi] for lo, hi, _ in self.bands],
            "band_generations": [gen for _, _, gen in self.bands],
            "points": self.points,
            "lower": self.lower,
            "upper": self.upper,
            "cutoff": list(self.cutoff),
            "barlow_perkins": self.barlow_perkins,
        }

    def contains(self, value: float, tol: float = 1e-9, which: str = "upper") -> bool:
        part = self.upper if which == "upper" else self.lower
        if any(lo - tol <= value <= hi + tol for lo, hi in part["bands"]):
            return True
        return any(abs(value - p) <= tol for p in part["points"])


def _band_preimages(lo: float, hi: float, max_len: int) -> list[tuple[float, float, int]]:
    from .lattice_harmonics import generation_bands
    if hi > 6.25 or lo < 0:
        raise ValueError("Gamma0 spectrum must lie in [0, 6.25]")
    return generation_bands((lo, hi), max_len)


def fractafold_spectrum(sigma0: dict, cutoff: tuple[int, int], julia_depth: int = 0) -> SpectrumReport:
    """Emit fR^{-1}(sigma0) bands and points plus the Sigma_inf series.

    sigma0 = {"bands": [(lo, hi), ...], "points": [p, ...]}. The lower set
    uses Sigma'_inf and the upper set Sigma_inf.
    """
    max_m0, max_len = cutoff
    if max_m0 < 0 or max_len < 0:
        raise ValueError("cutoff entries must be nonnegative")
    bands = []
    for lo, hi in sigma0.get("bands", []):
        bands += _band_preimages(float(lo), float(hi), max_len)
    bands.sort()
    points = []
    for p in sigma0.get("points", []):
        for val in frak_R_preimages(GASKET, float(p), max_len):
            points.append({"value": float(val), "series": f"R^-1{{{p:g}}}", "m0": 0})
    base_pts = [d["value"] for d in points]
    inf = enumerate_series("Sigma_inf", cutoff)
    infp = enumerate_series("Sigma_inf_prime", cutoff)
    prime_vals = {round(a.approx, 9) for a in infp.members}
    for a in inf.members:
        series = "Sigma_inf_prime" if round(a.approx, 9) in prime_vals else "Sigma_inf"
        points.append({"value": float(a.approx), "series": series, "m0": a.m0})
    points.sort(key=lambda d: (d["value"], d["series"]))
    band_pairs = [(lo, hi) for lo, hi, _ in bands]
    lower = {"bands": band_pairs, "points": sorted(base_pts + [a.approx for a in infp.members])}
    upper = {"bands": band_pairs, "points": sorted(base_pts + [a.approx for a in inf.members])}
    bp = barlow_perkins_display(julia_depth, max_len) if julia_depth else []
    return SpectrumReport(bands, points, lower, upper, (max_m0, max_len), bp)


def barlow_perkins_display(depth: int, max_len: int) -> list[dict]:
    """fR^{-1} of the Julia-set backward orbit, labelled as singular continuous."""
    pts = julia_backward_orbit(GASKET, depth)
    vals = frak_R_inverse_of_set(GASKET, pts, max_len)
    label = "singularly continuous component, spectral multiplicity one"
    return [{"value": float(v), "label": label} for v in vals]


# ---------------------------------------------------------------------------
# brute-force decimation check

@dataclass
class LevelReport:
    level: int
    n_vertices: int
    decimated: int
    exceptional: dict
    unclassified: int
    extension_residual: float

    @property
    def balanced(self) -> bool:
        return self.decimated + sum(self.exceptional.values()) == self.n_vertices


@dataclass
class DecimationReport:
    levels: list[LevelReport]

    @property
    def all_classified(self) -> bool:
        return all(r.unclassified == 0 and r.balanced for r in self.levels)

    def to_json(self) -> dict:
        return {"classification": {
            str(r.level): {
                "vertices": r.n_vertices,
                "decimated": r.decimated,
                "exceptional": {f"{k:.12g}": v for k, v in sorted(r.exceptional.items())},
                "unclassified": r.unclassified,
                "extension_residual": r.extension_residual,
            } for r in self.levels}}


def decimation_spectrum_check(base: CellGraph, levels: int, tol: float = 1e-8,
                              cap: int = DENSE_CAP) -> DecimationReport:
    """Classify every eigenvalue of Gamma_{m+1} against the spectrum of Gamma_m.

    A cluster (lambda', k) is decimated when lambda' is not forbidden and
    R(lambda') lies within tol of an eigenvalue mu of multiplicity k_mu; the
    Gamma_m eigenvectors at mu are extended and verified to be eigenvectors at
    lambda', and min(k, k_mu) copies are counted. Everything else (forbidden
    values, unmatched values, surplus multiplicity) is reported as exceptional.
    """
    mesh = FractafoldMesh(base, levels)
    if mesh.fine.n > cap:
        raise SizeCapError(f"level {levels} has {mesh.fine.n} vertices, cap {cap}")
    spectra = [brute_spectrum(g, VARIANT) for g in mesh.graphs]
    reports = []
    for m in range(levels):
        coarse, fine = spectra[m], spectra[m + 1]
        cc = cluster_eigenvalues(coarse.values, tol)
        fc = cluster_eigenvalues(fine.values, tol)
        dec, exc, unclassified, res_max = 0, {}, 0, 0.0
        for lam, k in fc:
            ext = ExtensionSystem(lam)
            match = None
            if not ext.is_forbidden(1e-9):
                r = lam * (5.0 - lam)
                dists = [abs(r - mu) for mu, _ in cc]
                j = int(np.argmin(dists))
                if dists[j] <= tol:
                    match = cc[j]
            if match is None:
                exc[lam] = exc.get(lam, 0) + k
                continue
            mu, kmu = match
            V = coarse.vectors[:, np.abs(coarse.values - mu) <= tol]
            W = extension_matrix(mesh.graphs[m], mesh.graphs[m + 1], lam) @ V
            res = np.abs(mesh.laplacian(m + 1) @ W - lam * W).max() / max(1.0, np.abs(W).max())
            res_max = max(res_max, float(res))
            if res > 1e-8:
                unclassified += k
                continue
            d = min(k, kmu)
            dec += d
            if k > d:
                exc[lam] = exc.get(lam, 0) + k - d
        reports.append(LevelReport(m + 1, mesh.graphs[m + 1].n, dec, exc, unclassified, res_max))
    return DecimationReport(reports)


# ---------------------------------------------------------------------------
# discrete resolution of identity

@dataclass
class ResolutionResult:
    identity_error: float
    idempotency_error: float
    n_decimated: int
    n_exceptional: int


def _chain(lam: float, n: int) -> list[float]:
    out = [lam]
    for _ in range(n):
        out.append(out[-1] * (5.0 - out[-1]))
    return out[::-1]  # lambda_0 .. lambda_n


def _word_of_chain(chain: list[float]) -> tuple[Branch, ...]:
    word = []
    for m in range(1, len(chain)):
        lo, hi = inverse_branches(GASKET, chain[m - 1])
        word.append(Branch.LO if abs(chain[m] - lo) <= abs(chain[m] - hi) else Branch.HI)
    return tuple(word)


def resolution_of_identity(mesh: FractafoldMesh, use_M: bool = True, tol: float = 1e-8) -> ResolutionResult:
    """Check sum of kernel projections plus exceptional projections = I at level n.

    Eigenvalues of Gamma_n whose chain lambda_n -> ... -> lambda_0 avoids the
    forbidden values and ends in spec(Gamma0) contribute the kernel
    (M / w0) Psi P_Gamma0 Psi^T W. The remaining eigenspaces, and the part of
    mixed eigenspaces orthogonal to the range of Psi, contribute brute-force
    projections. With use_M=False the normalization is replaced by 1.
    """
    g, n = mesh.fine, mesh.level
    w = mesh.weights()
    if not np.allclose(w, w[0]):
        raise ValueError("resolution check needs a uniform level-n measure")
    spec_n = brute_spectrum(g, VARIANT)
    spec_0 = brute_spectrum(mesh.base, VARIANT)
    Wd = np.diag(w)
    total = np.zeros((g.n, g.n))
    idem = 0.0
    n_dec = n_exc = 0
    for lam, k in cluster_eigenvalues(spec_n.values, tol):
        V = sla.orth(spec_n.vectors[:, np.abs(spec_n.values - lam) <= tol])
        Q = V @ V.T  # the measure is uniform, so counting-orthogonal is mu-orthogonal
        chain = _chain(lam, n)
        mu = chain[0]
        ok = all(not ExtensionSystem(x).is_forbidden(1e-9) for x in chain[1:])
        kmu = int(np.sum(np.abs(spec_0.values - mu) <= tol))
        if not ok or kmu == 0:
            total += Q
            n_exc += k
            continue
        addr = EigenvalueAddress(m0=0, seed=mu, word=_word_of_chain(chain))
        P0 = gamma0_projector(mesh.base, mu, tol)
        M = partial_M(addr, n) if use_M else 1.0
        P = fractafold_kernel(mesh, addr, P0, M=M) @ Wd
        idem = max(idem, float(np.abs(P @ P - P).max()))
        total += P
        n_dec += kmu
        if k > kmu:
            # complement of range(Psi P0) inside the eigenspace, by brute force
            B = sla.orth(np.asarray(Psi_matrix(mesh, addr) @ sla.orth(P0)))
            C = V - B @ (B.T @ V)
            C = sla.orth(C, rcond=1e-8)
            total += C @ C.T
            n_exc += k - kmu
    err = float(np.abs(total - np.eye(g.n)).max())
    return ResolutionResult(err, idem, n_dec, n_exc)
