"""l1-regularized personalized PageRank by local pushes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .flow import Embedding, LabelOracle, NonConvergence
from .graph import Graph


class DegenerateSeed(ValueError):
    """A seed carries score but has zero weighted degree."""


@dataclass
class PageRankConfig:
    alpha: float
    rho: float
    seed_scores: Mapping[int, float]
    max_pushes: int = 10**8

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.rho <= 0:
            raise ValueError("rho must be positive for the push loop to terminate")
        scores = {int(i): float(v) for i, v in dict(self.seed_scores).items() if v != 0}
        if any(v < 0 for v in scores.values()) or sum(scores.values()) <= 0:
            raise ValueError("seed scores must be nonnegative with positive total")
        self.seed_scores = scores


@dataclass
class PageRankResult(Embedding):
    """PageRank vector ``p`` plus the leftover residual ``r``."""

    residual: dict = field(default_factory=dict)


def solve_appr(G: Graph, config: PageRankConfig, labels: LabelOracle | None = None) -> PageRankResult:
    """Push residual until every node has ``r_i <= rho * deg_w(i)``.

    Each push moves ``alpha * r_i`` into ``p_i`` and spreads the rest of
    ``r_i`` over the neighbors in proportion to edge weight.
    """
    n = G.n
    if labels is None:
        labels_arr, eps, use_labels = np.zeros(n, dtype=np.int8), 1.0, False
    else:
        labels_arr, eps, use_labels = labels.labels, labels.eps, True
    seeds = sorted(config.seed_scores)
    for s in seeds:
        if not 0 <= s < n:
            raise IndexError(f"seed {s} out of range")
        if use_labels:
            labels.ensure_neighborhood(G, s)
    wdeg = np.full(n, -1.0)
    for s in seeds:
        lo, hi = G.indptr[s], G.indptr[s + 1]
        w = G.weights[lo:hi]
        if use_labels:
            w = np.where(labels_arr[G.indices[lo:hi]] == labels_arr[s], w, w * eps)
        wdeg[s] = w.sum()
        if wdeg[s] <= 0:
            raise DegenerateSeed(f"seed {s} has zero weighted degree")

    p = np.zeros(n)
    r = np.zeros(n)
    queue = np.zeros(n + 1, dtype=np.int64)
    in_queue = np.zeros(n, dtype=np.bool_)
    touched = np.zeros(n, dtype=np.bool_)
    touched_list = np.zeros(n, dtype=np.int64)
    counters = np.zeros(5, dtype=np.int64)
    for s in seeds:
        r[s] = config.seed_scores[s]
        K._mark(s, touched, touched_list, counters)
        if r[s] > config.rho * wdeg[s]:
            in_queue[s] = True
            queue[counters[K.C_TAIL]] = s
            counters[K.C_TAIL] += 1

    while True:
        status = K.pagerank_push(G.indptr, G.indices, G.weights, labels_arr, eps, use_labels,
                                 p, r, wdeg, config.alpha, config.rho, queue, in_queue,
                                 touched, touched_list, counters, config.max_pushes)
        if status == K.NEED_LABELS:
            labels.ensure_neighborhood(G, int(counters[K.C_NODE]))
            continue
        break
    if status == K.MAX_PUSHES:
        raise NonConvergence(f"push budget of {config.max_pushes} exhausted")
    if status == K.ZERO_DEGREE:
        raise DegenerateSeed(f"node {counters[K.C_NODE]} holds residual but has no positive edge")

    touched_ids = np.sort(touched_list[:counters[K.C_NTOUCHED]])
    nz = touched_ids[p[touched_ids] > 0]
    rz = touched_ids[r[touched_ids] > 0]
    return PageRankResult(nz, p[nz], touched=touched_ids, pushes=int(counters[K.C_PUSHES]),
                          residual={int(i): float(r[i]) for i in rz})


def residual_ratio(G: Graph, result: PageRankResult, labels: LabelOracle | None = None) -> float:
    """Largest ``r_i / deg_w(i)`` over nodes holding residual."""
    worst = 0.0
    for i, ri in result.residual.items():
        w = G.incident_weights(i)
        if labels is not None:
            labels.ensure_neighborhood(G, i)
            same = labels.labels[G.neighbors(i)] == labels.labels[i]
            w = np.where(same, w, w * labels.eps)
        d = w.sum()
        worst = max(worst, ri / d if d > 0 else np.inf)
    return worst


def degree_seed_scores(G: Graph, seeds: Sequence[int], labels: LabelOracle | None = None) -> dict:
    """Seed scores proportional to (weighted) degree, summing to one."""
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds:
        raise ValueError("at least one seed is required")
    degs = []
    for s in seeds:
        w = G.incident_weights(s)
        if labels is not None:
            labels.ensure_neighborhood(G, s)
            same = labels.labels[G.neighbors(s)] == labels.labels[s]
            w = np.where(same, w, w * labels.eps)
        degs.append(w.sum())
    total = sum(degs)
    if total <= 0:
        raise DegenerateSeed("seeds have zero total weighted degree")
    return {s: d / total for s, d in zip(seeds, degs)}


def default_appr_config(G: Graph, seeds: Sequence[int], fd_total_mass: float,
                        alpha_grid: Sequence[float] = (0.1,),
                        evaluate: Callable[[PageRankConfig], float] | None = None,
                        labels: LabelOracle | None = None) -> tuple[PageRankConfig, float]:
    """Build the PageRank setup used alongside flow diffusion.

    ``rho`` is the inverse of the total flow-diffusion source mass and seed
    scores follow degree. ``evaluate`` maps a candidate config to a score to
    minimise (typically sweep-cut conductance); the grid is scanned in
    ascending order and ties keep the smaller alpha.

    Returns:
        ``(config, chosen_alpha)``.
    """
    if fd_total_mass <= 0:
        raise ValueError("fd_total_mass must be positive")
    scores = degree_seed_scores(G, seeds, labels)
    rho = 1.0 / fd_total_mass
    grid = sorted(alpha_grid)
    if evaluate is None or len(grid) == 1:
        cfg = PageRankConfig(alpha=grid[0], rho=rho, seed_scores=scores)
        return cfg, grid[0]
    best = None
    for a in grid:
        cfg = PageRankConfig(alpha=a, rho=rho, seed_scores=scores)
        val = evaluate(cfg)
        if best is None or val < best[0]:
            best = (val, cfg)
    return best[1], best[1].alpha
