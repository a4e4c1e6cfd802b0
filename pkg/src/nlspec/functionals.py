"""Functional catalog constructors and grid graphs.

Grid convention: edge weight 1/h between axis neighbors, node measure h^d.
With this scaling the discrete Rayleigh quotients of the degree-1 functionals
converge to their continuum counterparts under grid refinement.  Dirichlet
grids carry an explicit layer of clamped boundary nodes; node indices are
row-major over the full lattice (boundary layer included).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WeightedGraph, FunctionalHandle, GRAPH_KINDS, norm
from .errors import BadParams


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int = 1
    spacing: float = 1.0
    boundary_mode: str = "neumann"

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise BadParams("grid needs width >= 1 and height >= 1")
        if not self.spacing > 0:
            raise BadParams("grid spacing must be positive")
        if self.boundary_mode not in ("neumann", "dirichlet"):
            raise BadParams(f"unknown boundary mode {self.boundary_mode!r}")

    @property
    def lattice_shape(self):
        """(rows, cols) of the full lattice including any boundary layer."""
        if self.boundary_mode == "neumann":
            return (self.height, self.width)
        if self.height == 1:
            return (1, self.width + 2)
        return (self.height + 2, self.width + 2)


def build_grid_graph(spec: GridSpec) -> WeightedGraph:
    rows, cols = spec.lattice_shape
    h = spec.spacing
    dim = 1 if spec.height == 1 else 2

    def idx(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1), 1.0 / h))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c), 1.0 / h))

    boundary = set()
    if spec.boundary_mode == "dirichlet":
        if spec.height == 1:
            boundary = {0, cols - 1}
        else:
            for r in range(rows):
                for c in range(cols):
                    if r in (0, rows - 1) or c in (0, cols - 1):
                        boundary.add(idx(r, c))

    n = rows * cols
    measure = np.full(n, h ** dim)
    return WeightedGraph(n=n, edges=tuple(edges), boundary=frozenset(boundary),
                         node_measure=measure)


def make_functional(kind: str, graph: WeightedGraph = None, *, p: float = None,
                    matrix=None, n: int = None, node_measure=None) -> FunctionalHandle:
    """Build a handle for one of the catalog functionals.

    kind in {quadratic_form, dirichlet_p, graph_tv, l1, linf, lipschitz_sup}.
    """
    if kind in GRAPH_KINDS:
        if graph is None:
            raise BadParams(f"{kind} requires a graph")
        if kind == "dirichlet_p":
            if p is None or p < 1:
                raise BadParams("dirichlet_p requires p >= 1")
            degree = float(p)
        else:
            p = None
            degree = 1.0
        return FunctionalHandle(kind=kind, degree=degree, graph=graph, p=p)

    if kind in ("l1", "linf"):
        if n is None and node_measure is None and graph is None:
            raise BadParams(f"{kind} requires a dimension")
        if graph is not None:
            n = graph.n
            node_measure = graph.node_measure
        if node_measure is not None:
            node_measure = np.asarray(node_measure, dtype=float)
            n = len(node_measure) if n is None else n
            if node_measure.shape != (n,) or not np.all(node_measure > 0):
                raise BadParams("node_measure must be positive and match n")
        return FunctionalHandle(kind=kind, degree=1.0, n=int(n),
                                node_measure=node_measure)

    if kind == "quadratic_form":
        if matrix is None:
            raise BadParams("quadratic_form requires a matrix")
        A = np.asarray(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise BadParams("quadratic_form matrix must be square")
        scale = max(float(np.max(np.abs(A))), 1.0)
        if float(np.max(np.abs(A - A.T))) > 1e-12 * scale:
            raise BadParams("quadratic_form matrix must be symmetric")
        nn = A.shape[0]
        if node_measure is not None:
            m = np.asarray(node_measure, dtype=float)
            if m.shape != (nn,) or not np.all(m > 0):
                raise BadParams("node_measure must be positive and match the matrix")
        else:
            m = np.ones(nn)
        # generalized spectrum A v = lam * M v, via symmetric rescaling
        s = np.sqrt(m)
        vals, vecs = np.linalg.eigh(A / np.outer(s, s))
        if vals[0] < -1e-10 * scale:
            raise BadParams(f"quadratic_form matrix is not PSD (min eigenvalue {vals[0]})")
        vecs = vecs / s[:, None]  # columns m-orthonormal
        return FunctionalHandle(kind="quadratic_form", degree=2.0, matrix=A,
                                n=nn, node_measure=node_measure,
                                _quad_eigvals=vals, _quad_eigvecs=vecs)

    raise BadParams(f"unknown functional kind {kind!r}")


def laplacian_matrix(graph: WeightedGraph) -> np.ndarray:
    """Graph Laplacian L with 0.5*<Lu,u> = dirichlet_p(u) at p=2."""
    L = np.zeros((graph.n, graph.n))
    for (i, j, w) in graph.edges:
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L
