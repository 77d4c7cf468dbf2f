"""Sweep-cut rounding of a node embedding."""
from __future__ import annotations

import numpy as np

from . import _kernels as K
from .flow import Embedding
from .graph import Graph


def sweep_order(G: Graph, x: Embedding, normalize_by_degree: bool = False) -> np.ndarray:
    """Support of ``x`` by descending score, ties by ascending id."""
    nodes, vals = x.nodes, x.values
    if normalize_by_degree:
        deg = G.degrees[nodes].astype(np.float64)
        vals = np.divide(vals, deg, out=np.full(len(vals), np.inf), where=deg > 0)
    return nodes[np.lexsort((nodes, -vals))]


def sweep_cut(G_original: Graph, x: Embedding, normalize_by_degree: bool = False):
    """Prefix of the sweep order with the smallest conductance.

    Conductance is measured on the unweighted topology of ``G_original``;
    prefixes never leave ``supp(x)``. The first minimum wins.

    Returns:
        ``(cluster, conductance)`` with ``cluster`` a sorted id array.
    """
    if len(x) == 0:
        raise ValueError("cannot sweep an embedding with empty support")
    order = sweep_order(G_original, x, normalize_by_degree)
    if len(order) == G_original.n:
        order = order[:-1]
        if len(order) == 0:
            raise ValueError("sweep over a single-node graph is undefined")
    degrees = G_original.degrees.astype(np.float64)
    rank = np.full(G_original.n, -1, dtype=np.int64)
    phi = K.sweep_prefix(order, G_original.indptr, G_original.indices, degrees,
                         float(degrees.sum()), rank)
    best = int(np.argmin(phi))
    return np.sort(order[:best + 1]), float(phi[best])
