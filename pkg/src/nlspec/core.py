"""Domain types and theorem-level diagnostics.

Signals are plain float64 numpy arrays over graph nodes; all inner products
carry the per-node measure m_i (default 1), i.e.

    <u, v> = sum_i m_i u_i v_i.

The functional catalog is p-homogeneous and convex; `evaluate` dispatches on
the handle kind.  Diagnostics (Rayleigh quotient, Euler identity residual,
dual-ball membership, eigen certificates) are pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import edgecalc
from .errors import (
    BadParams,
    DimensionMismatch,
    NullspaceElement,
    UnsupportedFunctional,
    ZeroSignal,
)

GRAPH_KINDS = ("graph_tv", "dirichlet_p", "lipschitz_sup")
VECTOR_KINDS = ("l1", "linf")
ALL_KINDS = GRAPH_KINDS + VECTOR_KINDS + ("quadratic_form",)

#: relative floor below which a deviation from the nullspace counts as zero
NULLSPACE_FLOOR = 1e-13


def as_signal(values, n: Optional[int] = None) -> np.ndarray:
    u = np.asarray(values, dtype=float)
    if u.ndim != 1 or u.size < 1:
        raise DimensionMismatch(f"signal must be a 1-D vector, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DimensionMismatch("signal contains NaN or infinite entries")
    if n is not None and u.size != n:
        raise DimensionMismatch(f"signal has length {u.size}, expected {n}")
    return u


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph with an optional Dirichlet boundary set."""

    n: int
    edges: tuple  # of (i, j, w) with 0 <= i < j < n, w > 0
    boundary: frozenset = frozenset()
    node_measure: np.ndarray = None

    def __post_init__(self):
        if self.n < 1:
            raise BadParams("graph needs at least one node")
        seen = set()
        for (i, j, w) in self.edges:
            if not (0 <= i < j < self.n):
                raise BadParams(f"bad edge ({i},{j}): need 0 <= i < j < n")
            if (i, j) in seen:
                raise BadParams(f"duplicate edge ({i},{j})")
            if not w > 0:
                raise BadParams(f"edge ({i},{j}) has non-positive weight {w}")
            seen.add((i, j))
        for b in self.boundary:
            if not (0 <= b < self.n):
                raise BadParams(f"boundary node {b} out of range")
        if self.node_measure is None:
            object.__setattr__(self, "node_measure", np.ones(self.n))
        else:
            m = np.asarray(self.node_measure, dtype=float)
            if m.shape != (self.n,) or not np.all(m > 0):
                raise BadParams("node_measure must be positive and of length n")
            object.__setattr__(self, "node_measure", m)
        if not self._connected():
            raise BadParams("graph is not connected")
        i_idx = np.array([e[0] for e in self.edges], dtype=int)
        j_idx = np.array([e[1] for e in self.edges], dtype=int)
        w = np.array([e[2] for e in self.edges], dtype=float)
        interior = np.ones(self.n, dtype=bool)
        for b in self.boundary:
            interior[b] = False
        object.__setattr__(self, "_i_idx", i_idx)
        object.__setattr__(self, "_j_idx", j_idx)
        object.__setattr__(self, "_w", w)
        object.__setattr__(self, "_interior", interior)

    def _connected(self) -> bool:
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (i, j, _) in self.edges:
            parent[find(i)] = find(j)
        roots = {find(i) for i in range(self.n)}
        return len(roots) == 1

    @property
    def edge_arrays(self):
        return self._i_idx, self._j_idx, self._w

    @property
    def interior_mask(self) -> np.ndarray:
        return self._interior


@dataclass(frozen=True)
class FunctionalHandle:
    """Descriptor of a p-homogeneous convex functional."""

    kind: str
    degree: float
    graph: Optional[WeightedGraph] = None
    matrix: Optional[np.ndarray] = None
    p: Optional[float] = None
    node_measure: Optional[np.ndarray] = None  # for l1/linf on plain vectors
    n: int = 0
    # spectral data of quadratic forms, filled at construction
    _quad_eigvals: Optional[np.ndarray] = field(default=None, repr=False)
    _quad_eigvecs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def measure(self) -> np.ndarray:
        if self.graph is not None:
            return self.graph.node_measure
        if self.node_measure is not None:
            return self.node_measure
        return np.ones(self.n)

    @property
    def dim(self) -> int:
        return self.graph.n if self.graph is not None else self.n

    @property
    def has_boundary(self) -> bool:
        return self.graph is not None and len(self.graph.boundary) > 0


def inner(u: np.ndarray, v: np.ndarray, measure: np.ndarray) -> float:
    return float(np.sum(measure * u * v))


def norm(u: np.ndarray, measure: np.ndarray) -> float:
    return math.sqrt(max(inner(u, u, measure), 0.0))


def clamp_boundary(F: FunctionalHandle, u: np.ndarray) -> np.ndarray:
    """Zero out Dirichlet nodes; identity for boundary-free functionals."""
    if not F.has_boundary:
        return u
    v = u.copy()
    v[~F.graph.interior_mask] = 0.0
    return v


def _check(F: FunctionalHandle, u) -> np.ndarray:
    return as_signal(u, F.dim)


def evaluate(F: FunctionalHandle, u) -> float:
    """J(u) for every catalog kind; >= 0 and exactly p-homogeneous."""
    u = _check(F, u)
    if F.kind == "quadratic_form":
        return 0.5 * float(u @ (F.matrix @ u))
    if F.kind == "l1":
        return float(np.sum(F.measure * np.abs(u)))
    if F.kind == "linf":
        return float(np.max(np.abs(u)))
    v = clamp_boundary(F, u)
    i_idx, j_idx, w = F.graph.edge_arrays
    d = np.abs(edgecalc.edge_diff(v, i_idx, j_idx))
    if F.kind == "graph_tv":
        return float(np.sum(w * d))
    if F.kind == "dirichlet_p":
        return float(np.sum(w * d ** F.p)) / F.p
    if F.kind == "lipschitz_sup":
        return float(np.max(w * d)) if len(d) else 0.0
    raise UnsupportedFunctional(F.kind)


def evaluate_batch(F: FunctionalHandle, U: np.ndarray) -> np.ndarray:
    """J applied to the rows of U; used by the brute-force prox oracle."""
    U = np.asarray(U, dtype=float)
    if F.kind == "quadratic_form":
        return 0.5 * np.einsum("ki,ij,kj->k", U, F.matrix, U)
    if F.kind == "l1":
        return np.abs(U) @ F.measure
    if F.kind == "linf":
        return np.max(np.abs(U), axis=1)
    V = U.copy()
    if F.has_boundary:
        V[:, ~F.graph.interior_mask] = 0.0
    i_idx, j_idx, w = F.graph.edge_arrays
    D = np.abs(V[:, j_idx] - V[:, i_idx])
    if F.kind == "graph_tv":
        return D @ w
    if F.kind == "dirichlet_p":
        return (D ** F.p) @ w / F.p
    if F.kind == "lipschitz_sup":
        return np.max(w * D, axis=1) if D.shape[1] else np.zeros(len(U))
    raise UnsupportedFunctional(F.kind)


def nullspace_basis(F: FunctionalHandle) -> np.ndarray:
    """Measure-orthonormal basis of N_J = {u : J(u) = 0}, shape (n, k)."""
    n, m = F.dim, F.measure
    if F.kind == "quadratic_form":
        vals, vecs = F._quad_eigvals, F._quad_eigvecs
        scale = max(float(np.max(np.abs(vals))), 1.0)
        cols = vecs[:, np.abs(vals) <= 1e-12 * scale]
        return cols
    if F.kind in VECTOR_KINDS or F.has_boundary:
        return np.zeros((n, 0))
    # connected graph without boundary: constants
    c = np.ones(n) / norm(np.ones(n), m)
    return c.reshape(n, 1)


def project_nullspace(F: FunctionalHandle, u) -> np.ndarray:
    u = _check(F, u)
    B = nullspace_basis(F)
    if B.shape[1] == 0:
        return np.zeros_like(u)
    coeff = B.T @ (F.measure * u)
    return B @ coeff


def rayleigh(F: FunctionalHandle, u) -> float:
    """p * J(u - P_N u) / ||u - P_N u||^p."""
    u = _check(F, u)
    v = u - project_nullspace(F, u)
    nv = norm(v, F.measure)
    if nv < NULLSPACE_FLOOR * math.sqrt(F.dim):
        raise NullspaceElement("signal is in the nullspace of the functional")
    return F.degree * evaluate(F, v) / nv ** F.degree


def euler_residual(F: FunctionalHandle, u, zeta) -> float:
    """|p J(u) - <zeta, u>|; zero whenever zeta is a subgradient at u."""
    u = _check(F, u)
    zeta = _check(F, zeta)
    return abs(F.degree * evaluate(F, u) - inner(zeta, u, F.measure))


def dual_ball_membership(F: FunctionalHandle, zeta, tol: float = 1e-9,
                         max_iter: int = 20000) -> bool:
    """Is zeta in K_J = dJ(0) = {z : <z,u> <= J(u) for all u}?

    Only defined for one-homogeneous functionals.  For graph functionals the
    question is a dual flow-feasibility problem, decided by a projected
    least-squares fit of edge flows.
    """
    if F.degree != 1:
        raise UnsupportedFunctional("dual ball only defined for degree-1 functionals")
    zeta = _check(F, zeta)
    m = F.measure
    if F.kind == "l1":
        return float(np.max(np.abs(zeta))) <= 1.0 + tol
    if F.kind == "linf":
        return float(np.sum(m * np.abs(zeta))) <= 1.0 + tol
    # graph_tv / lipschitz_sup / dirichlet_p(p=1): zeta must be a divergence
    # of an admissible edge flow; Dirichlet nodes carry no constraint.
    i_idx, j_idx, w = F.graph.edge_arrays
    interior = F.graph.interior_mask
    if F.kind in ("graph_tv", "dirichlet_p"):
        def project(phi):
            return edgecalc.project_box(phi, w)
    else:  # lipschitz_sup: dual ball is an l1-type coupling of edge flows
        def project(phi):
            return edgecalc.project_weighted_l1(phi, 1.0 / w, np.ones_like(w), 1.0)

    scale = norm(zeta, m)
    if scale == 0.0:
        return True
    psi = _edge_fit(zeta, i_idx, j_idx, m, interior, project, tol * scale, max_iter)
    r = edgecalc.edge_div(psi, i_idx, j_idx, m) - zeta
    r[~interior] = 0.0
    return norm(r, m) <= tol * (1.0 + scale)


def _edge_fit(g, i_idx, j_idx, measure, interior, project, tol, max_iter):
    """min_psi 0.5*||div(psi) - g||^2_{m,interior} s.t. psi in the projected set.

    FISTA with constant step 1/L; used only as a feasibility test.
    """
    L = edgecalc.grad_div_opnorm(i_idx, j_idx, measure, interior)
    psi = np.zeros(len(i_idx))
    y = psi.copy()
    t = 1.0
    for it in range(max_iter):
        r = edgecalc.edge_div(y, i_idx, j_idx, measure) - g
        r[~interior] = 0.0
        grad = edgecalc.edge_diff(r, i_idx, j_idx)
        psi_new = project(y - grad / L)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = psi_new + ((t - 1.0) / t_new) * (psi_new - psi)
        step = float(np.max(np.abs(psi_new - psi))) if len(psi) else 0.0
        psi, t = psi_new, t_new
        if it > 10 and step * L < 0.01 * tol:
            break
    return psi


def min_norm_subgradient(F: FunctionalHandle, u) -> np.ndarray:
    """Closed-form minimal-norm subgradient for l1 / linf."""
    u = _check(F, u)
    m = F.measure
    if F.kind == "l1":
        return np.sign(u)
    if F.kind == "linf":
        umax = float(np.max(np.abs(u)))
        if umax == 0.0:
            raise ZeroSignal("linf has no subgradient selection at 0")
        eps = 1e-9 * umax
        argmax = np.abs(u) >= umax - eps
        mass = float(np.sum(m[argmax]))
        zeta = np.zeros_like(u)
        zeta[argmax] = np.sign(u[argmax]) / mass
        return zeta
    raise UnsupportedFunctional(
        "min-norm subgradients in closed form exist only for l1/linf")


@dataclass(frozen=True)
class EigenCertificate:
    """Residuals that vanish exactly for a true eigenpair.

    subgradient_gap > 0 certifies NOT an eigenpair (one-sided sampled test);
    gap == 0 is necessary but not sufficient.
    """

    euler_residual: float
    subgradient_gap: float
    collinearity: float

    @property
    def max_residual(self) -> float:
        return max(self.euler_residual, self.subgradient_gap, self.collinearity)


def eigen_certificate(F: FunctionalHandle, w, lam: float, samples: int = 32,
                      seed: int = 0) -> EigenCertificate:
    w = _check(F, w)
    m = F.measure
    nw = norm(w, m)
    if nw == 0.0:
        raise ZeroSignal("cannot certify the zero signal")
    zeta = lam * nw ** (F.degree - 2.0) * w
    e_res = euler_residual(F, w, zeta)
    jw = evaluate(F, w)
    rng = np.random.default_rng(seed)
    gap = 0.0
    for _ in range(samples):
        v = rng.standard_normal(F.dim)
        nv = norm(v, m)
        if nv > 0:
            v = v / nv
        g = jw + inner(zeta, v - w, m) - evaluate(F, v)
        gap = max(gap, g)
    gap = max(gap, 0.0)
    nz = norm(zeta, m)
    if nz > 0:
        coll = max(0.0, 1.0 - inner(zeta, w, m) / (nz * nw))
    else:
        coll = 0.0
    return EigenCertificate(e_res, gap, coll)
