"""Compiled push loops shared by flow diffusion and l1-regularized PageRank.

Both loops read edge weights as ``base_weight * (1 if labels agree else eps)``
when ``use_labels`` is set. A label of -1 means "not yet predicted": the loop
then stops before touching that neighborhood and reports the node, so the
caller can fill the labels in and resume with the same state arrays.
"""
import numpy as np
from numba import njit

DONE = 0
NEED_LABELS = 1
MAX_PUSHES = 2
ZERO_DEGREE = 3

# layout of the ``counters`` int64 array
C_HEAD, C_TAIL, C_PUSHES, C_NTOUCHED, C_NODE = 0, 1, 2, 3, 4


@njit(cache=True, inline="always")
def _edge_weight(w, li, lj, eps, use_labels):
    if use_labels and li != lj:
        return w * eps
    return w


@njit(cache=True)
def _labels_ready(indptr, indices, labels, i):
    if labels[i] < 0:
        return False
    for k in range(indptr[i], indptr[i + 1]):
        if labels[indices[k]] < 0:
            return False
    return True


@njit(cache=True)
def _mark(j, touched, touched_list, counters):
    if not touched[j]:
        touched[j] = True
        touched_list[counters[C_NTOUCHED]] = j
        counters[C_NTOUCHED] += 1


@njit(cache=True)
def flow_push(indptr, indices, weights, labels, eps, use_labels,
              x, mass, sink, queue, in_queue, touched, touched_list,
              counters, tol, max_pushes):
    """FIFO coordinate push for the l2 flow diffusion dual.

    ``mass`` holds the net mass Delta_i + sum_j w_ij (x_j - x_i) of every node.
    A push raises x_i until node i holds exactly its sink capacity.
    """
    cap = queue.shape[0]
    while counters[C_HEAD] != counters[C_TAIL]:
        i = queue[counters[C_HEAD]]
        if use_labels and not _labels_ready(indptr, indices, labels, i):
            counters[C_NODE] = i
            return NEED_LABELS
        counters[C_HEAD] = (counters[C_HEAD] + 1) % cap
        in_queue[i] = False
        excess = mass[i] - sink[i]
        if excess <= tol:
            continue
        d = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            d += _edge_weight(weights[k], labels[i], labels[indices[k]], eps, use_labels)
        if d <= 0.0:
            counters[C_NODE] = i
            return ZERO_DEGREE
        if counters[C_PUSHES] >= max_pushes:
            counters[C_NODE] = i
            return MAX_PUSHES
        delta = excess / d
        x[i] += delta
        mass[i] = sink[i]
        counters[C_PUSHES] += 1
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            _mark(j, touched, touched_list, counters)
            wij = _edge_weight(weights[k], labels[i], labels[j], eps, use_labels)
            if wij > 0.0:
                mass[j] += wij * delta
                if not in_queue[j] and mass[j] > sink[j] + tol:
                    in_queue[j] = True
                    queue[counters[C_TAIL]] = j
                    counters[C_TAIL] = (counters[C_TAIL] + 1) % cap
    return DONE


@njit(cache=True)
def pagerank_push(indptr, indices, weights, labels, eps, use_labels,
                  p, r, wdeg, alpha, rho, queue, in_queue, touched, touched_list,
                  counters, max_pushes):
    """FIFO push for l1-regularized PageRank (non-lazy variant).

    ``wdeg`` caches weighted degrees, -1 where not yet computed. A node is
    pushed while its residual exceeds ``rho`` times its weighted degree.
    """
    cap = queue.shape[0]
    while counters[C_HEAD] != counters[C_TAIL]:
        i = queue[counters[C_HEAD]]
        if wdeg[i] < 0.0:
            if use_labels and not _labels_ready(indptr, indices, labels, i):
                counters[C_NODE] = i
                return NEED_LABELS
            d = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                d += _edge_weight(weights[k], labels[i], labels[indices[k]], eps, use_labels)
            wdeg[i] = d
        counters[C_HEAD] = (counters[C_HEAD] + 1) % cap
        in_queue[i] = False
        ri = r[i]
        if ri <= rho * wdeg[i]:
            continue
        if wdeg[i] <= 0.0:
            counters[C_NODE] = i
            return ZERO_DEGREE
        if counters[C_PUSHES] >= max_pushes:
            counters[C_NODE] = i
            return MAX_PUSHES
        # labels of i's neighborhood are known once wdeg[i] is
        p[i] += alpha * ri
        r[i] = 0.0
        counters[C_PUSHES] += 1
        spread = (1.0 - alpha) * ri / wdeg[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            _mark(j, touched, touched_list, counters)
            wij = _edge_weight(weights[k], labels[i], labels[j], eps, use_labels)
            if wij > 0.0:
                r[j] += spread * wij
                if not in_queue[j] and (wdeg[j] < 0.0 or r[j] > rho * wdeg[j]):
                    in_queue[j] = True
                    queue[counters[C_TAIL]] = j
                    counters[C_TAIL] = (counters[C_TAIL] + 1) % cap
    return DONE


@njit(cache=True)
def sweep_prefix(order, indptr, indices, degrees, total_vol, rank):
    """Conductance of every prefix of ``order`` on an unweighted graph.

    ``rank`` must be a length-n int array filled with -1; it is restored
    before returning.
    """
    m = order.shape[0]
    out = np.empty(m)
    cut = 0.0
    vol = 0.0
    for t in range(m):
        v = order[t]
        rank[v] = t
        inside = 0
        for k in range(indptr[v], indptr[v + 1]):
            if rank[indices[k]] >= 0 and indices[k] != v:
                inside += 1
        vol += degrees[v]
        cut += degrees[v] - 2.0 * inside
        denom = min(vol, total_vol - vol)
        if denom > 0.0:
            out[t] = cut / denom
        else:
            out[t] = np.inf
    for t in range(m):
        rank[order[t]] = -1
    return out
