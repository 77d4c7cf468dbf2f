"""Local l2-norm flow diffusion.

The dual problem is ``min 1/2 x'Lx + x'(T - Delta)  s.t. x >= 0``. Its
solution ``x`` is a node embedding: node ``i`` sends ``w_ij (x_i - x_j)``
units of mass to each neighbor and every node with ``x_i > 0`` ends up
holding exactly ``T_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import _kernels as K
from .graph import Graph


class InfeasibleDiffusion(RuntimeError):
    """Source mass exceeds the sink capacity reachable from it."""


class NonConvergence(RuntimeError):
    """The push budget ran out before all excess was settled."""


class LabelOracle:
    """Noisy labels that may be filled in on demand.

    ``labels`` uses -1 for nodes whose label is not known yet. When a solver
    needs the label of such a node it calls ``predict(nodes)``, which must
    return a 0/1 array aligned with ``nodes``. With no ``predict`` callback
    every label must already be known.
    """

    def __init__(self, labels, eps: float, predict: Callable | None = None):
        if not 0.0 <= eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")
        self.labels = np.array(labels, dtype=np.int8)
        self.eps = float(eps)
        self.predict = predict
        if predict is None and np.any(self.labels < 0):
            raise ValueError("unknown labels need a predict callback")

    @classmethod
    def lazy(cls, n: int, eps: float, predict: Callable) -> "LabelOracle":
        return cls(np.full(n, -1, dtype=np.int8), eps, predict)

    @property
    def predicted_count(self) -> int:
        return int(np.count_nonzero(self.labels >= 0))

    def ensure(self, nodes) -> None:
        nodes = np.asarray(nodes, dtype=np.int64)
        missing = nodes[self.labels[nodes] < 0]
        if len(missing):
            missing = np.unique(missing)
            self.labels[missing] = np.asarray(self.predict(missing), dtype=np.int8)

    def ensure_neighborhood(self, G: Graph, i: int) -> None:
        self.ensure(np.concatenate([[i], G.neighbors(i)]))


@dataclass
class DiffusionProblem:
    """Source mass, sink capacities and solver limits over one graph.

    ``sink`` may be a scalar (uniform capacity), ``"degree"`` (capacity equal
    to the unweighted degree), a mapping, or a dense array.
    """

    graph: Graph
    source: Mapping[int, float]
    sink: object = 1.0
    tolerance: float = 1e-6
    max_pushes: int = 10**8
    check_feasibility: bool = False

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_pushes <= 0:
            raise ValueError("max_pushes must be positive")
        src = {int(i): float(v) for i, v in dict(self.source).items() if v != 0}
        if any(v < 0 for v in src.values()):
            raise ValueError("source mass must be nonnegative")
        if sum(src.values()) <= 0:
            raise ValueError("total source mass must be positive")
        for i in src:
            if not 0 <= i < self.graph.n:
                raise IndexError(f"source node {i} out of range")
        self.source = src

    @property
    def total_mass(self) -> float:
        return sum(self.source.values())

    def sink_array(self) -> np.ndarray:
        n = self.graph.n
        if isinstance(self.sink, str):
            if self.sink != "degree":
                raise ValueError(f"unknown sink mode {self.sink!r}")
            return self.graph.degrees.astype(np.float64)
        if np.isscalar(self.sink):
            if self.sink < 0:
                raise ValueError("sink capacity must be nonnegative")
            return np.full(n, float(self.sink))
        if isinstance(self.sink, Mapping):
            T = np.zeros(n)
            for i, v in self.sink.items():
                T[int(i)] = v
        else:
            T = np.array(self.sink, dtype=np.float64)
            if T.shape != (n,):
                raise ValueError("sink array must have one entry per node")
        if np.any(T < 0):
            raise ValueError("sink capacity must be nonnegative")
        return T

    def source_array(self) -> np.ndarray:
        D = np.zeros(self.graph.n)
        for i, v in self.source.items():
            D[i] = v
        return D


@dataclass
class Embedding:
    """Sparse nonnegative node scores plus solver bookkeeping."""

    nodes: np.ndarray
    values: np.ndarray
    touched: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    pushes: int = 0

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        keep = self.values > 0
        order = np.argsort(self.nodes[keep], kind="stable")
        self.nodes = self.nodes[keep][order]
        self.values = self.values[keep][order]

    @classmethod
    def from_dict(cls, x: Mapping[int, float], **kw) -> "Embedding":
        items = sorted(x.items())
        return cls(np.array([i for i, _ in items], dtype=np.int64),
                   np.array([v for _, v in items], dtype=np.float64), **kw)

    @classmethod
    def from_dense(cls, x: np.ndarray, **kw) -> "Embedding":
        x = np.asarray(x, dtype=np.float64)
        nz = np.flatnonzero(x > 0)
        return cls(nz, x[nz], **kw)

    def as_dict(self) -> dict:
        return {int(i): float(v) for i, v in zip(self.nodes, self.values)}

    def dense(self, n: int) -> np.ndarray:
        x = np.zeros(n)
        x[self.nodes] = self.values
        return x

    def __len__(self):
        return len(self.nodes)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def support(x) -> np.ndarray:
    """Node ids carrying a positive value."""
    if isinstance(x, Embedding):
        return x.nodes.copy()
    if isinstance(x, Mapping):
        return np.array(sorted(i for i, v in x.items() if v != 0), dtype=np.int64)
    return np.flatnonzero(np.asarray(x) != 0)


def _oracle_arrays(G: Graph, labels: LabelOracle | None):
    if labels is None:
        return np.zeros(G.n, dtype=np.int8), 1.0, False
    if len(labels.labels) != G.n:
        raise ValueError("label oracle does not match graph size")
    return labels.labels, labels.eps, True


def effective_graph(G: Graph, labels: LabelOracle | None) -> Graph:
    """Materialise the reweighted graph; predicts every missing label."""
    if labels is None:
        return G
    labels.ensure(np.arange(G.n))
    rows = np.repeat(np.arange(G.n), G.degrees)
    same = labels.labels[rows] == labels.labels[G.indices]
    return G.with_weights(np.where(same, G.weights, G.weights * labels.eps))


def check_feasible(problem: DiffusionProblem, labels: LabelOracle | None = None) -> None:
    """Raise if some positive-weight component holds more source than sink.

    Scans whole components, so this is not a local operation.
    """
    G = effective_graph(problem.graph, labels)
    T = problem.sink_array()
    _, comp = connected_components(_positive_adjacency(G), directed=False)
    src = problem.source_array()
    need = np.bincount(comp, weights=src)
    have = np.bincount(comp, weights=T, minlength=len(need))
    bad = np.flatnonzero(need > have)
    if len(bad):
        c = int(bad[0])
        raise InfeasibleDiffusion(
            f"component holding source mass {need[c]:.6g} has sink capacity {have[c]:.6g}")


def _positive_adjacency(G: Graph) -> sp.csr_matrix:
    rows = np.repeat(np.arange(G.n), G.degrees)
    keep = G.weights > 0
    return sp.csr_matrix((np.ones(np.count_nonzero(keep)), (rows[keep], G.indices[keep])),
                         shape=(G.n, G.n))


def _initial_mass(G, labels_arr, eps, use_labels, D, start: Embedding | None, oracle):
    mass = D.copy()
    x = np.zeros(G.n)
    if start is None or len(start) == 0:
        return x, mass
    for i, xi in zip(start.nodes, start.values):
        if use_labels:
            oracle.ensure_neighborhood(G, int(i))
        lo, hi = G.indptr[i], G.indptr[i + 1]
        nbrs = G.indices[lo:hi]
        w = G.weights[lo:hi]
        if use_labels:
            w = np.where(labels_arr[nbrs] == labels_arr[i], w, w * eps)
        mass[i] -= w.sum() * xi
        np.add.at(mass, nbrs, w * xi)
        x[i] = xi
    return x, mass


def solve_flow_diffusion(problem: DiffusionProblem, labels: LabelOracle | None = None,
                         start: Embedding | None = None) -> Embedding:
    """Solve the flow diffusion dual by FIFO coordinate pushes.

    Args:
        problem: source, sink and solver limits.
        labels: optional label oracle; edge weights are then scaled by
            ``labels.eps`` across label boundaries, with labels predicted
            only for nodes the diffusion actually reaches.
        start: optional warm start. It must lie below the optimum of
            ``problem``, e.g. the solution for a smaller source mass at the
            same nodes.

    Returns:
        The embedding, with the touched node set and push count.

    Raises:
        InfeasibleDiffusion: excess mass stuck at a node with no positive
            edge weight, total source beyond total capacity, or (with
            ``check_feasibility``) a component that cannot absorb its mass.
        NonConvergence: ``max_pushes`` exhausted.
    """
    G = problem.graph
    n = G.n
    T = problem.sink_array()
    D = problem.source_array()
    if problem.total_mass > T.sum() + problem.tolerance:
        raise InfeasibleDiffusion(
            f"total source mass {problem.total_mass:.6g} exceeds total capacity {T.sum():.6g}")
    if problem.check_feasibility:
        check_feasible(problem, labels)
    labels_arr, eps, use_labels = _oracle_arrays(G, labels)

    x, mass = _initial_mass(G, labels_arr, eps, use_labels, D, start, labels)
    cap = n + 1
    queue = np.zeros(cap, dtype=np.int64)
    in_queue = np.zeros(n, dtype=np.bool_)
    touched = np.zeros(n, dtype=np.bool_)
    touched_list = np.zeros(n, dtype=np.int64)
    counters = np.zeros(5, dtype=np.int64)

    seeds = sorted(problem.source)
    if start is not None:
        seeds = sorted(set(seeds) | set(start.nodes.tolist()))
    for i in seeds:
        K._mark(i, touched, touched_list, counters)
    if start is not None:
        for i in start.nodes:
            for j in G.neighbors(i):
                K._mark(j, touched, touched_list, counters)
    for i in np.flatnonzero(touched):
        if mass[i] > T[i] + problem.tolerance:
            in_queue[i] = True
            queue[counters[K.C_TAIL]] = i
            counters[K.C_TAIL] += 1

    while True:
        status = K.flow_push(G.indptr, G.indices, G.weights, labels_arr, eps, use_labels,
                             x, mass, T, queue, in_queue, touched, touched_list,
                             counters, problem.tolerance, problem.max_pushes)
        if status == K.NEED_LABELS:
            labels.ensure_neighborhood(G, int(counters[K.C_NODE]))
            continue
        break
    if status == K.ZERO_DEGREE:
        raise InfeasibleDiffusion(
            f"node {counters[K.C_NODE]} has excess mass but no positive-weight edge")
    if status == K.MAX_PUSHES:
        raise NonConvergence(f"push budget of {problem.max_pushes} exhausted")

    touched_ids = np.sort(touched_list[:counters[K.C_NTOUCHED]])
    nz = touched_ids[x[touched_ids] > 0]
    return Embedding(nz, x[nz], touched=touched_ids, pushes=int(counters[K.C_PUSHES]))


def net_mass(G: Graph, source, x) -> np.ndarray:
    """Mass held by each node: ``Delta_i + sum_j w_ij (x_j - x_i)``."""
    xd = x.dense(G.n) if isinstance(x, Embedding) else np.asarray(x, dtype=np.float64)
    D = np.zeros(G.n)
    for i, v in dict(source).items():
        D[int(i)] = v
    A = G.to_scipy()
    return D + A @ xd - G.weighted_degrees * xd


def kkt_violation(problem: DiffusionProblem, x, labels: LabelOracle | None = None) -> float:
    """Largest breach of the optimality conditions of the dual.

    Checks ``m_i <= T_i``, ``m_i >= T_i`` where ``x_i > 0``, and ``x >= 0``.
    """
    G = effective_graph(problem.graph, labels)
    xd = x.dense(G.n) if isinstance(x, Embedding) else np.asarray(x, dtype=np.float64)
    m = net_mass(G, problem.source, xd)
    T = problem.sink_array()
    over = np.max(m - T, initial=0.0)
    under = np.max(np.where(xd > 0, T - m, 0.0), initial=0.0)
    neg = np.max(-xd, initial=0.0)
    return float(max(over, under, neg))


def edge_flows(G: Graph, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mass routed along each edge ``i < j`` from ``i`` to ``j``."""
    xd = x.dense(G.n) if isinstance(x, Embedding) else np.asarray(x, dtype=np.float64)
    i, j, w = G.edges()
    return i, j, w * (xd[i] - xd[j])


def qp_oracle(problem: DiffusionProblem, labels: LabelOracle | None = None,
              max_iter: int = 200_000) -> Embedding:
    """Dense reference solver for small instances.

    Projected gradient descent on the full Laplacian, alternated with an
    exact solve of the stationarity equations on the current support. Kept
    independent of the push code on purpose.
    """
    G = effective_graph(problem.graph, labels)
    if G.n > 2000:
        raise ValueError("qp_oracle is dense and limited to 2000 nodes")
    tol = problem.tolerance / 10
    L = G.laplacian()
    c = problem.sink_array() - problem.source_array()
    if np.all(c >= 0):
        return Embedding(np.zeros(0, np.int64), np.zeros(0))
    lmax = max(np.linalg.eigvalsh(L)[-1], 1e-12)
    step = 1.0 / lmax
    x = np.zeros(G.n)

    def proj_grad(x):
        g = L @ x + c
        return np.where(x > 0, g, np.minimum(g, 0.0))

    def polish(x):
        S = np.flatnonzero(x > 0)
        if len(S) == 0:
            return None
        sol, *_ = np.linalg.lstsq(L[np.ix_(S, S)], -c[S], rcond=None)
        cand = np.zeros(G.n)
        cand[S] = sol
        if np.all(sol > 0) and np.linalg.norm(proj_grad(cand), np.inf) < tol:
            return cand
        return None

    for it in range(max_iter):
        x = np.maximum(x - step * (L @ x + c), 0.0)
        converged = np.linalg.norm(proj_grad(x), np.inf) < tol
        if converged or it % 50 == 49:
            exact = polish(x)
            if exact is not None:
                x = exact
                break
            if converged:
                break
    else:
        raise NonConvergence("projected gradient did not reach the requested tolerance")
    return Embedding.from_dense(x, touched=np.arange(G.n))
