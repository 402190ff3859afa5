"""Finite cell graphs, edge graphs, triangle refinement, Laplacians and the
sum operators S1/S2, with a dense diagonalization oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import GraphError, SizeCapError

DENSE_CAP = 4000
ROLES = ("Gamma", "Gamma0", "field")
FAMILIES = (
    "K4", "tree_ball", "ladder_segment", "circular_ladder", "honeycomb_patch",
    "hex_torus", "triangular_patch", "tri_torus", "single_triangle",
)


@dataclass(eq=False)
class CellGraph:
    """Undirected simple graph with optional triangle cells and a boundary mask."""

    n: int
    edges: np.ndarray
    cells: np.ndarray
    boundary: np.ndarray
    role: str
    family: str = "custom"
    params: dict = field(default_factory=dict)
    labels: list | None = None
    # edge graph bookkeeping: the Gamma graph and, per vertex, its Gamma edge index
    parent: "CellGraph | None" = None
    # refinement bookkeeping: per old cell the new vertices [p, q, r] opposite a, b, c
    midpoints: np.ndarray | None = None
    refined_from: "CellGraph | None" = None

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        e = np.sort(e, axis=1)
        if e.size and np.any(e[:, 0] == e[:, 1]):
            raise GraphError("self loops are not allowed")
        e = np.unique(e, axis=0) if e.size else e
        self.edges = e
        self.cells = np.asarray(self.cells, dtype=np.int64).reshape(-1, 3)
        self.boundary = np.asarray(self.boundary, dtype=bool).reshape(self.n)
        if self.role not in ROLES:
            raise GraphError(f"unknown role {self.role!r}")

    # --- structure ---------------------------------------------------------
    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        n = self.n
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(i))
        A = sp.coo_matrix((data, (np.r_[i, j], np.r_[j, i])), shape=(n, n)).tocsr()
        A.sort_indices()
        return A

    @cached_property
    def degree(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel().astype(np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        A = self.adjacency
        return A.indices[A.indptr[v]:A.indptr[v + 1]]

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @cached_property
    def label_index(self) -> dict:
        if self.labels is None:
            raise GraphError("graph has no labels")
        return {lab: i for i, lab in enumerate(self.labels)}

    def cell_count(self) -> np.ndarray:
        """Number of cells containing each vertex."""
        cnt = np.zeros(self.n, dtype=np.int64)
        np.add.at(cnt, self.cells.ravel(), 1)
        return cnt

    def check_invariants(self) -> None:
        """Raise GraphError when the role-specific degree/cell invariants fail."""
        deg = self.degree
        inner = self.interior
        if self.role == "Gamma" and np.any(deg[inner] != 3):
            raise GraphError("interior vertex of a cell graph with degree != 3")
        if self.role == "Gamma0":
            if np.any(deg[inner] != 4):
                raise GraphError("interior vertex of an edge graph with degree != 4")
            if np.any(self.cell_count()[inner] != 2):
                raise GraphError("interior vertex of an edge graph not in exactly two cells")
        if self.role == "field":
            if np.any(deg[inner] != 6) or np.any(self.cell_count()[inner] != 3):
                raise GraphError("interior field vertex must have degree 6 and three cells")
        eset = {tuple(e) for e in self.edges.tolist()}
        for c in self.cells.tolist():
            a, b, d = sorted(c)
            if (a, b) not in eset or (b, d) not in eset or (a, d) not in eset:
                raise GraphError(f"cell {c} is not a triangle of the graph")

    # --- operators ---------------------------------------------------------
    def laplacian(self, variant: str = "graph") -> sp.csr_matrix:
        """Matrix of -Delta. Variants: graph (D - A), probabilistic (I - D^-1 A),
        prob4 (4 (I - D^-1 A))."""
        A = self.adjacency
        deg = self.degree.astype(float)
        if variant == "graph":
            return (sp.diags(deg) - A).tocsr()
        if variant in ("probabilistic", "prob4"):
            with np.errstate(divide="ignore"):
                dinv = np.where(deg > 0, 1.0 / deg, 0.0)
            L = (sp.identity(self.n) - sp.diags(dinv) @ A).tocsr()
            return 4.0 * L if variant == "prob4" else L
        raise GraphError(f"unknown Laplacian variant {variant!r}")

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "vertices": list(range(self.n)),
            "edges": self.edges.tolist(),
            "cells": self.cells.tolist(),
            "boundary": np.flatnonzero(self.boundary).tolist(),
            "role": self.role,
        }


def graph_from_json(data: dict | str) -> CellGraph:
    if isinstance(data, str):
        data = json.loads(data)
    verts = list(data["vertices"])
    index = {v: i for i, v in enumerate(verts)}
    edges = [[index[a], index[b]] for a, b in data.get("edges", [])]
    cells = [[index[a], index[b], index[c]] for a, b, c in data.get("cells", [])]
    bmask = np.zeros(len(verts), dtype=bool)
    for b in data.get("boundary", []):
        bmask[index[b]] = True
    role = data.get("role")
    if role is None:
        role = "Gamma0" if cells else "Gamma"
    return CellGraph(n=len(verts), edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
                     cells=np.array(cells, dtype=np.int64).reshape(-1, 3), boundary=bmask,
                     role=role, family=data.get("family", "custom"), params=data.get("params", {}),
                     labels=verts)


@dataclass(frozen=True)
class LaplacianOperator:
    graph: CellGraph
    variant: str = "graph"

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        return self.graph.laplacian(self.variant)

    def apply(self, f):
        return neg_laplacian_apply(self.graph, f, self.variant)


def neg_laplacian_apply(g: CellGraph, f, variant: str = "graph"):
    """Matrix-free -Delta f. Rows at boundary vertices are computed as well;
    use g.interior to select the rows where identities hold."""
    f = np.asarray(f)
    if f.shape[0] != g.n:
        raise GraphError("function does not live on this graph")
    A = g.adjacency
    af = A @ f
    deg = g.degree.astype(float)
    if f.ndim > 1:
        deg = deg[:, None]
    if variant == "graph":
        return deg * f - af
    if variant in ("probabilistic", "prob4"):
        out = f - af / np.where(deg > 0, deg, 1.0)
        return 4.0 * out if variant == "prob4" else out
    raise GraphError(f"unknown Laplacian variant {variant!r}")


# ---------------------------------------------------------------------------
# families

def _make(n, edges, cells, boundary, role, family, params, labels=None):
    g = CellGraph(n=n, edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
                  cells=np.array(cells, dtype=np.int64).reshape(-1, 3),
                  boundary=np.asarray(boundary, dtype=bool), role=role, family=family,
                  params=dict(params), labels=labels)
    return g


def _positive(**kw):
    for k, v in kw.items():
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise GraphError(f"{k} must be a positive integer, got {v!r}")


def tree_labels(radius: int) -> list[tuple]:
    """Vertices of the radius ball of the 3-regular tree in breadth-first order.

    The root is (), its children are (0,), (1,), (2,) and every later vertex
    has two children obtained by appending 0 or 1.
    """
    layers = [[()]]
    for d in range(1, radius + 1):
        nxt = []
        for v in layers[-1]:
            kids = (0, 1, 2) if len(v) == 0 else (0, 1)
            nxt.extend(v + (c,) for c in kids)
        layers.append(nxt)
    return [v for layer in layers for v in layer]


def build_graph(family: str, **params) -> CellGraph:
    """Construct one of the named graph families with deterministic numbering."""
    if family == "K4":
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        g = _make(4, edges, [], np.zeros(4), "Gamma", family, params, labels=list(range(4)))
    elif family == "tree_ball":
        r = params.get("radius")
        _positive(radius=r)
        labels = tree_labels(r)
        index = {lab: i for i, lab in enumerate(labels)}
        edges = [(index[lab[:-1]], i) for i, lab in enumerate(labels) if lab]
        bnd = [len(lab) == r for lab in labels]
        g = _make(len(labels), edges, [], bnd, "Gamma", family, params, labels=labels)
    elif family in ("ladder_segment", "circular_ladder"):
        n = params.get("n")
        _positive(n=n)
        circ = family == "circular_ladder"
        if circ and n < 3:
            raise GraphError("circular_ladder needs n >= 3")
        if not circ and n < 2:
            raise GraphError("ladder_segment needs n >= 2")
        edges = []
        for k in range(n):
            edges.append((2 * k, 2 * k + 1))
            if k + 1 < n or circ:
                kk = (k + 1) % n
                edges.append((2 * k, 2 * kk))
                edges.append((2 * k + 1, 2 * kk + 1))
        labels = [(s, k) for k in range(n) for s in ("a", "b")]
        bnd = np.zeros(2 * n, dtype=bool)
        if not circ:
            bnd[[0, 1, 2 * n - 2, 2 * n - 1]] = True
        g = _make(2 * n, edges, [], bnd, "Gamma", family, params, labels=labels)
    elif family in ("honeycomb_patch", "hex_torus"):
        g = _honeycomb(family, params)
    elif family in ("triangular_patch", "tri_torus"):
        g = _triangular(family, params)
    elif family == "single_triangle":
        g = _make(3, [(0, 1), (1, 2), (0, 2)], [(0, 1, 2)], np.ones(3), "Gamma0", family,
                  params, labels=[0, 1, 2])
    else:
        raise GraphError(f"unknown family {family!r}; expected one of {FAMILIES}")
    g.check_invariants()
    return g


def _honeycomb(family, params):
    torus = family == "hex_torus"
    if torus:
        m, n = params.get("m"), params.get("n")
        _positive(m=m, n=n)
        if m < 2 or n < 2:
            raise GraphError("hex_torus needs m, n >= 2")
        cells_idx = [(j, k) for j in range(m) for k in range(n)]
    else:
        r = params.get("radius")
        _positive(radius=r)
        cells_idx = [(j, k) for j in range(-r, r + 1) for k in range(-r, r + 1)]
    labels = [(s, j, k) for (j, k) in cells_idx for s in ("a", "b")]
    index = {lab: i for i, lab in enumerate(labels)}

    def norm(j, k):
        return (j % m, k % n) if torus else (j, k)

    edges = []
    for (j, k) in cells_idx:
        a = index[("a", j, k)]
        for (jj, kk) in ((j, k), (j - 1, k), (j, k - 1)):
            lab = ("b",) + norm(jj, kk)
            if lab in index:
                edges.append((a, index[lab]))
    g = _make(len(labels), edges, [], np.zeros(len(labels)), "Gamma", family, params, labels)
    if not torus:
        g.boundary = g.degree < 3
    return g


def _triangular(family, params):
    torus = family == "tri_torus"
    if torus:
        m, n = params.get("m"), params.get("n")
        _positive(m=m, n=n)
        if m < 3 or n < 3:
            raise GraphError("tri_torus needs m, n >= 3")
        pts = [(i, j) for i in range(m) for j in range(n)]
    else:
        r = params.get("radius")
        _positive(radius=r)
        pts = [(i, j) for i in range(-r, r + 1) for j in range(-r, r + 1)]
    index = {p: t for t, p in enumerate(pts)}

    def norm(i, j):
        return (i % m, j % n) if torus else (i, j)

    edges, cells = [], []
    for (i, j) in pts:
        a = index[(i, j)]
        b, c = norm(i + 1, j), norm(i, j + 1)
        if b in index and c in index:
            cells.append((a, index[b], index[c]))
        for q in (b, c, norm(i + 1, j - 1)):
            if q in index:
                edges.append((a, index[q]))
    g = _make(len(pts), edges, cells, np.zeros(len(pts)), "field", family, params, pts)
    if not torus:
        g.boundary = (g.degree < 6) | (g.cell_count() < 3)
    return g


# ---------------------------------------------------------------------------
# edge graph, refinement, sum operators

def edge_graph(g: CellGraph) -> CellGraph:
    """Edge graph Gamma0 of a cell graph Gamma: one triangle cell per degree-3 vertex."""
    if g.role != "Gamma":
        raise GraphError("edge_graph expects a Gamma-role graph")
    E = g.edges
    inc: list[list[int]] = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(E.tolist()):
        inc[a].append(e)
        inc[b].append(e)
    edges, cells = [], []
    for v in range(g.n):
        es = inc[v]
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                edges.append((es[i], es[j]))
        if len(es) == 3:
            cells.append(tuple(es))
    bnd = g.boundary[E[:, 0]] | g.boundary[E[:, 1]]
    labels = None
    if g.labels is not None:
        labels = [(g.labels[a], g.labels[b]) for a, b in E.tolist()]
    g0 = _make(len(E), edges, cells, bnd, "Gamma0", g.family, {**g.params, "edge_graph": True},
               labels)
    g0.parent = g
    return g0


def refine(g: CellGraph) -> CellGraph:
    """Replace every triangle cell by the three-triangle level-one gasket figure.

    Old vertices keep their indices. Cell i = (a, b, c) receives new vertices
    p, q, r = n + 3i + (0, 1, 2) opposite a, b, c and children (a, r, q),
    (r, b, p), (q, p, c) with indices 3i, 3i + 1, 3i + 2. Edges that belong to
    no cell are kept unchanged.
    """
    if len(g.cells) == 0:
        raise GraphError("refine needs a graph with cells")
    n, C = g.n, len(g.cells)
    cell_edges = set()
    for a, b, c in g.cells.tolist():
        cell_edges.update({tuple(sorted(x)) for x in ((a, b), (b, c), (a, c))})
    edges = [tuple(e) for e in g.edges.tolist() if tuple(e) not in cell_edges]
    mids = n + np.arange(3 * C).reshape(C, 3)
    cells = []
    for i, (a, b, c) in enumerate(g.cells.tolist()):
        p, q, r = mids[i].tolist()
        edges += [(a, r), (a, q), (r, q), (r, b), (b, p), (r, p), (q, p), (p, c), (q, c)]
        cells += [(a, r, q), (r, b, p), (q, p, c)]
    bnd = np.r_[g.boundary, np.zeros(3 * C, dtype=bool)]
    out = _make(n + 3 * C, edges, cells, bnd, g.role, g.family,
                {**g.params, "level": g.params.get("level", 0) + 1})
    out.midpoints = mids
    out.refined_from = g
    return out


def S1_matrix(gamma: CellGraph, gamma0: CellGraph) -> sp.csr_matrix:
    """Incidence operator S1 f(x) = f(a) + f(b) for the Gamma0 vertex x = [a, b]."""
    if gamma0.parent is not gamma:
        raise GraphError("gamma0 is not the edge graph of gamma")
    E = gamma.edges
    rows = np.repeat(np.arange(len(E)), 2)
    return sp.csr_matrix((np.ones(2 * len(E)), (rows, E.ravel())), shape=(len(E), gamma.n))


def S1_apply(gamma: CellGraph, gamma0: CellGraph, f):
    return S1_matrix(gamma, gamma0) @ np.asarray(f)


def S2_apply(gamma: CellGraph, gamma0: CellGraph, F):
    return S1_matrix(gamma, gamma0).T @ np.asarray(F)


# ---------------------------------------------------------------------------
# dense oracle

@dataclass
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray
    variant: str


def brute_spectrum(g: CellGraph, variant: str = "graph", cap: int = DENSE_CAP,
                   check: bool = True) -> Spectrum:
    """Full dense eigendecomposition of -Delta.

    For the graph variant the eigenvectors are orthonormal. For the
    probabilistic variants they are right eigenvectors, orthonormal in the
    degree-weighted inner product.
    """
    if g.n > cap:
        raise SizeCapError(f"{g.n} vertices exceeds dense cap {cap}")
    A = g.adjacency.toarray()
    deg = g.degree.astype(float)
    if variant == "graph":
        w, V = sla.eigh(np.diag(deg) - A)
    elif variant in ("probabilistic", "prob4"):
        s = 1.0 / np.sqrt(deg)
        w, U = sla.eigh(np.eye(g.n) - s[:, None] * A * s[None, :])
        V = s[:, None] * U
        if variant == "prob4":
            w = 4.0 * w
    else:
        raise GraphError(f"unknown Laplacian variant {variant!r}")
    if check:
        L = g.laplacian(variant)
        res = np.abs(L @ V - V * w[None, :]).max() if g.n else 0.0
        if res > 1e-9:
            raise RuntimeError(f"dense eigensolver residual {res:.3e}")
    return Spectrum(values=w, vectors=V, variant=variant)


def cluster_eigenvalues(values: np.ndarray, tol: float = 1e-8) -> list[tuple[float, int]]:
    """Group sorted eigenvalues into (mean value, multiplicity) clusters."""
    vals = np.sort(np.asarray(values, dtype=float))
    out: list[tuple[float, int]] = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            out.append((float(vals[start:i].mean()), i - start))
            start = i
    return out


def octahedron() -> CellGraph:
    return edge_graph(build_graph("K4"))
