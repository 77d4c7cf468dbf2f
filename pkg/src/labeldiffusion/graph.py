"""Immutable sparse undirected weighted graphs in CSR form."""
from __future__ import annotations

from typing import Iterable

import numpy as np
import scipy.sparse as sp


class Graph:
    """Undirected weighted graph on dense node ids ``0..n-1``.

    Adjacency is stored as CSR arrays with neighbors sorted by id, each
    undirected edge appearing once in each endpoint's row. Zero-weight edges
    are kept in the topology.
    """

    __slots__ = ("n", "indptr", "indices", "weights", "_wdeg", "_deg")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, weights: np.ndarray):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        for arr in (self.indptr, self.indices, self.weights):
            arr.flags.writeable = False
        self._wdeg = None
        self._deg = None

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def neighbors(self, i: int) -> np.ndarray:
        self._check(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def incident_weights(self, i: int) -> np.ndarray:
        self._check(i)
        return self.weights[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        """Number of neighbors, zero-weight edges included."""
        self._check(i)
        return int(self.indptr[i + 1] - self.indptr[i])

    def weighted_degree(self, i: int) -> float:
        self._check(i)
        return float(self.weighted_degrees[i])

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            deg = np.diff(self.indptr)
            deg.flags.writeable = False
            self._deg = deg
        return self._deg

    @property
    def weighted_degrees(self) -> np.ndarray:
        if self._wdeg is None:
            rows = np.repeat(np.arange(self.n), self.degrees)
            wdeg = np.bincount(rows, weights=self.weights, minlength=self.n).astype(np.float64)
            wdeg.flags.writeable = False
            self._wdeg = wdeg
        return self._wdeg

    @property
    def total_weight(self) -> float:
        """Sum of edge weights, each undirected edge counted once."""
        return float(self.weights.sum()) / 2.0

    def edges(self):
        """Return ``(i, j, w)`` arrays for each undirected edge with ``i < j``."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        upper = rows < self.indices
        return rows[upper], self.indices[upper], self.weights[upper]

    def with_weights(self, weights: np.ndarray) -> "Graph":
        """Same topology, new per-slot weights (must stay symmetric)."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self.weights.shape:
            raise ValueError("weight array does not match adjacency layout")
        return Graph(self.n, self.indptr, self.indices, weights)

    def unweighted(self) -> "Graph":
        return self.with_weights(np.ones_like(self.weights))

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))

    def laplacian(self) -> np.ndarray:
        """Dense weighted Laplacian; only sensible for small graphs."""
        A = self.to_scipy().toarray()
        return np.diag(A.sum(axis=1)) - A

    def _check(self, i):
        if not 0 <= i < self.n:
            raise IndexError(f"node {i} out of range for graph with {self.n} nodes")


def build_graph(n: int, edges: Iterable) -> Graph:
    """Build a graph from ``(i, j)`` or ``(i, j, w)`` tuples.

    Self-loops are dropped. Repeated pairs (in either orientation) collapse to
    a single edge carrying the weight of the last occurrence.
    """
    if n <= 0:
        raise ValueError("node count must be positive")
    arr = edges if isinstance(edges, np.ndarray) else list(edges)
    if len(arr) == 0:
        return Graph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, np.int64), np.zeros(0))
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError("edges must be (i, j) or (i, j, w) tuples")
    src = arr[:, 0].astype(np.int64)
    dst = arr[:, 1].astype(np.int64)
    w = arr[:, 2] if arr.shape[1] == 3 else np.ones(len(arr))
    return from_arrays(n, src, dst, w)


def from_arrays(n: int, src: np.ndarray, dst: np.ndarray, w: np.ndarray | None = None) -> Graph:
    """Vectorised constructor behind :func:`build_graph`."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    w = np.ones(len(src)) if w is None else np.asarray(w, dtype=np.float64)
    if len(src):
        lo = min(src.min(), dst.min())
        hi = max(src.max(), dst.max())
        if lo < 0 or hi >= n:
            raise IndexError(f"edge endpoint out of range [0, {n})")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("edge weights must be finite and nonnegative")
    keep = src != dst
    src, dst, w = src[keep], dst[keep], w[keep]
    a = np.minimum(src, dst)
    b = np.maximum(src, dst)
    key = a * n + b
    # last occurrence wins: unique over the reversed arrays keeps first-in-reverse
    _, first_rev = np.unique(key[::-1], return_index=True)
    pick = len(key) - 1 - first_rev
    a, b, w = a[pick], b[pick], w[pick]

    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])
    ws = np.concatenate([w, w])
    order = np.lexsort((cols, rows))
    rows, cols, ws = rows[order], cols[order], ws[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return Graph(n, indptr, cols, ws)


def as_node_array(S, n: int) -> np.ndarray:
    """Validate a node set and return its sorted unique ids."""
    S = np.unique(np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64))
    if len(S) and (S[0] < 0 or S[-1] >= n):
        raise IndexError(f"node id out of range [0, {n})")
    return S


def set_stats(G: Graph, S) -> tuple[float, float, float, float]:
    """Return ``(cut, vol, internal_vol, conductance)`` of node set ``S``.

    Conductance is ``cut / min(vol(S), vol(V \\ S))``.
    """
    S = as_node_array(S, G.n)
    if len(S) == 0 or len(S) == G.n:
        raise ValueError("conductance is undefined for the empty set or the full node set")
    mask = np.zeros(G.n, dtype=bool)
    mask[S] = True
    rows = np.repeat(np.arange(G.n), G.degrees)
    in_row = mask[rows]
    crossing = in_row & ~mask[G.indices]
    cut = float(G.weights[crossing].sum())
    vol = float(G.weighted_degrees[S].sum())
    internal = float(G.weights[in_row & mask[G.indices]].sum())
    denom = min(vol, 2.0 * G.total_weight - vol)
    conductance = cut / denom if denom > 0 else float("inf")
    return cut, vol, internal, conductance


def conductance(G: Graph, S) -> float:
    return set_stats(G, S)[3]
