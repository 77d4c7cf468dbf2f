"""Random graph models with a planted target cluster."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, from_arrays


@dataclass(frozen=True)
class ModelSpec:
    """Local random model: a planted cluster ``K = {0..k-1}`` inside ``n`` nodes.

    ``outside`` fixes the edges among the other ``n - k`` nodes:
    ``("none",)``, ``("erdos_renyi", q_out)`` or
    ``("sbm_blocks", block_size, p_in, p_out)``.
    """

    n: int
    k: int
    p: float
    q: float
    outside: tuple = ("none",)

    def __post_init__(self):
        if not 2 <= self.k < self.n:
            raise ValueError("need 2 <= k < n")
        if not 0.0 <= self.q <= self.p <= 1.0:
            raise ValueError("need 0 <= q <= p <= 1")
        kind = self.outside[0]
        if kind == "erdos_renyi":
            if len(self.outside) != 2 or not 0 <= self.outside[1] <= 1:
                raise ValueError("erdos_renyi outside policy needs one probability")
        elif kind == "sbm_blocks":
            if len(self.outside) != 4:
                raise ValueError("sbm_blocks outside policy needs (block_size, p_in, p_out)")
            size = self.outside[1]
            if size <= 0 or (self.n - self.k) % size:
                raise ValueError("outside block size must divide n - k")
        elif kind != "none":
            raise ValueError(f"unknown outside policy {kind!r}")


def _rect_pairs(rng, r0, nr, c0, nc, prob):
    total = nr * nc
    if prob <= 0 or total == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    m = rng.binomial(total, prob)
    idx = rng.choice(total, size=m, replace=False)
    return r0 + idx // nc, c0 + idx % nc


def _tri_pairs(rng, off, size, prob):
    total = size * (size - 1) // 2
    if prob <= 0 or total == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    m = rng.binomial(total, prob)
    t = rng.choice(total, size=m, replace=False).astype(np.int64)
    # t = i(i-1)/2 + j with 0 <= j < i
    i = np.floor((1 + np.sqrt(1 + 8 * t.astype(np.float64))) / 2).astype(np.int64)
    i -= (i * (i - 1) // 2 > t)
    i += ((i + 1) * i // 2 <= t)
    j = t - i * (i - 1) // 2
    return off + i, off + j


def _block_edges(rng, sizes, p_in, p_out):
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    src, dst = [], []
    for a, (sa, na) in enumerate(zip(starts, sizes)):
        s, d = _tri_pairs(rng, sa, na, p_in)
        src.append(s)
        dst.append(d)
        for sb, nb in zip(starts[a + 1:], sizes[a + 1:]):
            s, d = _rect_pairs(rng, sa, na, sb, nb, p_out)
            src.append(s)
            dst.append(d)
    return src, dst


def _permute(rng, n, src, dst, groups):
    perm = rng.permutation(n)
    return perm[src], perm[dst], [np.sort(perm[g]) for g in groups]


def generate_local_model(spec: ModelSpec, rng: np.random.Generator, permute: bool = False):
    """Draw a graph from the local random model.

    Pairs inside ``K`` are joined with probability ``p``, pairs between ``K``
    and the rest with probability ``q``, and the rest follows
    ``spec.outside``. Returns ``(graph, K)``.
    """
    n, k = spec.n, spec.k
    src, dst = [], []
    s, d = _tri_pairs(rng, 0, k, spec.p)
    src.append(s)
    dst.append(d)
    s, d = _rect_pairs(rng, 0, k, k, n - k, spec.q)
    src.append(s)
    dst.append(d)
    kind = spec.outside[0]
    if kind == "erdos_renyi":
        s, d = _tri_pairs(rng, k, n - k, spec.outside[1])
        src.append(s)
        dst.append(d)
    elif kind == "sbm_blocks":
        size, p_in, p_out = spec.outside[1:]
        bs, bd = _block_edges(rng, [size] * ((n - k) // size), p_in, p_out)
        src += [b + k for b in bs]
        dst += [b + k for b in bd]
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    K = np.arange(k)
    if permute:
        src, dst, (K,) = _permute(rng, n, src, dst, [K])
    return from_arrays(n, src, dst), K


def generate_sbm(k: int, c: int, p: float, q: float, rng: np.random.Generator,
                 permute: bool = False):
    """Stochastic block model with ``c`` equal clusters of size ``k``.

    Returns ``(graph, clusters)`` where cluster ``b`` is ids
    ``b*k .. (b+1)*k - 1`` unless ``permute`` is set.
    """
    if c < 2:
        raise ValueError("need at least two clusters")
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    n = k * c
    src, dst = _block_edges(rng, [k] * c, p, q)
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    clusters = [np.arange(b * k, (b + 1) * k) for b in range(c)]
    if permute:
        src, dst, clusters = _permute(rng, n, src, dst, clusters)
    return from_arrays(n, src, dst), clusters


def gamma(n: int, k: int, p: float, q: float) -> float:
    """Ratio of expected internal to external degree of a target node."""
    if q <= 0:
        raise ValueError("gamma is infinite for q = 0")
    if not k < n:
        raise ValueError("need k < n")
    return p * (k - 1) / (q * (n - k))


def expected_sbm_edges(k: int, c: int, p: float, q: float) -> tuple[float, float]:
    """Mean and variance of the SBM edge count."""
    pairs_in = c * k * (k - 1) / 2
    pairs_out = c * (c - 1) / 2 * k * k
    mean = pairs_in * p + pairs_out * q
    var = pairs_in * p * (1 - p) + pairs_out * q * (1 - q)
    return mean, var


def cluster_means(c: int, separation: float) -> np.ndarray:
    """``c`` points on a circle, neighbouring points ``separation`` apart."""
    radius = separation / (2 * np.sin(np.pi / c))
    angles = 2 * np.pi * np.arange(c) / c
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def attributed_sbm(k: int, c: int, p: float, q: float, rng: np.random.Generator,
                   sigma: float = 1.0, separation: float = 2.0):
    """SBM whose nodes carry 2-D Gaussian features, one mean per cluster.

    Means sit on a circle with neighbouring means ``separation * sigma``
    apart. Returns ``(graph, clusters, features)``.
    """
    G, clusters = generate_sbm(k, c, p, q, rng)
    means = cluster_means(c, separation * sigma)
    owner = np.repeat(np.arange(c), k)
    X = means[owner] + sigma * rng.standard_normal((k * c, 2))
    return G, clusters, X
