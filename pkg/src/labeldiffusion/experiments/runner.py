"""Trial orchestration for synthetic and attributed-graph experiments."""
from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..classifier import (InsufficientSupport, predict_labels, pseudo_label_pipeline,
                          sample_outside, train_logistic)
from ..flow import (DiffusionProblem, Embedding, InfeasibleDiffusion, LabelOracle,
                    solve_flow_diffusion)
from ..graph import Graph, conductance
from ..labels import generate_noisy_labels
from ..models import ModelSpec, attributed_sbm, generate_sbm
from ..pagerank import default_appr_config, solve_appr
from ..sweep import sweep_cut
from ..theory import (ModelParams, bounds_formal, bounds_simplified, conjecture_margins,
                      fd_f1_upper, labels_f1_closed_form, monte_carlo_verify)
from .config import ExperimentConfig
from .io import load_dataset
from .metrics import cluster_scores

NAN = float("nan")


@dataclass
class TrialRecord:
    point: int
    trial: int
    cluster: int
    method: str
    seed_node: int = -1
    p: float = NAN
    q: float = NAN
    a0: float = NAN
    a1: float = NAN
    eps: float = NAN
    alpha: float = NAN
    pr_alpha: float = NAN
    theta: float = NAN
    oracle: bool = False
    f1: float = NAN
    f1_paper_variant: float = NAN
    precision: float = NAN
    recall: float = NAN
    conductance: float = NAN
    size: int = 0
    touched_nodes: int = 0
    pushes: int = 0
    predicted_labels: int = -1
    note: str = ""
    error: str = ""
    runtime_ms: float = 0.0


@dataclass
class TheoryRecord:
    point: int
    n: int
    k: int
    p: float
    q: float
    a0: float
    a1: float
    gamma: float
    f1_lower: float
    a0_threshold: float
    formal_f1_lower: float
    formal_a0_threshold: float
    theta_dagger: float
    r: float
    r_prime: float
    fp_lower: float
    fp_upper: float
    hypotheses_hold: bool
    fd_f1_upper: float
    labels_f1: float
    c1_lhs: float
    c1_rhs: float
    c1_holds: bool
    c2_lhs: float
    c2_rhs: float
    c2_holds: bool
    mc_trials: int = 0
    l1_failures: int = -1
    l2_failures: int = -1
    l3_failures: int = -1
    mean_cut_ratio: float = NAN
    mean_internal_ratio: float = NAN
    expected_cut_ratio: float = NAN
    expected_internal_ratio: float = NAN


def trial_rng(master_seed: int, trial: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (graph, everything else) streams for one trial."""
    g, rest = np.random.SeedSequence([master_seed, trial]).spawn(2)
    return np.random.default_rng(g), np.random.default_rng(rest)


def _lfd_name(base: str, eps: float, cfg: ExperimentConfig) -> str:
    return f"{base}(eps={eps:g})" if cfg.eps_list else base


def _eps_values(cfg: ExperimentConfig) -> list[float]:
    return [float(e) for e in cfg.eps_list] or [cfg.eps]


def _sink(cfg: ExperimentConfig, real: bool):
    if cfg.sink is None:
        return "degree" if real else 1.0
    return cfg.sink


def _fill(rec: TrialRecord, C, K, G: Graph) -> TrialRecord:
    s = cluster_scores(C, K)
    rec.f1, rec.f1_paper_variant = s.f1, s.f1_paper_variant
    rec.precision, rec.recall = s.precision, s.recall
    rec.size = len(C)
    if 0 < len(C) < G.n:
        rec.conductance = conductance(G, C)
    return rec


def _check_locality(rec: TrialRecord, G: Graph, x: Embedding, sink) -> None:
    if np.isscalar(sink) and sink == 1.0:
        bound = rec.theta + float(G.degrees[x.nodes].sum())
        if x.touched is not None and len(x.touched) > bound:
            raise RuntimeError(f"touched {len(x.touched)} nodes, more than {bound:g}")


def _diffuse(G, source, sink, tol, labels=None, start=None, strict=False):
    problem = DiffusionProblem(G, source, sink=sink, tolerance=tol, check_feasibility=strict)
    return solve_flow_diffusion(problem, labels, start)


def _best_support(G, K, seed, k_scale, grid, sink, tol, labels, base: TrialRecord):
    """Scan source masses upward with warm starts, keep the best-F1 support."""
    strict = labels is not None and labels.eps == 0.0
    best, x_prev, pushes, touched = None, None, 0, 0
    skipped = 0
    for a in sorted(grid):
        theta = a * k_scale
        try:
            x = _diffuse(G, {seed: theta}, sink, tol, labels, start=x_prev, strict=strict)
        except InfeasibleDiffusion:
            skipped = len(grid) - sorted(grid).index(a)
            break
        x_prev = x
        pushes += x.pushes
        touched = max(touched, len(x.touched))
        f1 = cluster_scores(x.nodes, K).f1
        if best is None or f1 > best[0]:
            best = (f1, a, theta, x)
    if best is None:
        raise InfeasibleDiffusion("every source mass on the grid is infeasible")
    _, a, theta, x = best
    rec = base
    rec.alpha, rec.theta, rec.oracle = a, theta, True
    _fill(rec, x.nodes, K, G)
    rec.touched_nodes, rec.pushes = touched, pushes
    _check_locality(rec, G, x, sink)
    if skipped:
        rec.note = "; ".join(filter(None, (rec.note, f"skipped {skipped} infeasible source masses")))
    return rec


def _sweep_diffusion(G, K, source, sink, tol, labels, rec: TrialRecord, normalize=False):
    strict = labels is not None and labels.eps == 0.0 and labels.predict is None
    x = _diffuse(G, source, sink, tol, labels, strict=strict)
    C, _ = sweep_cut(G, x, normalize)
    _fill(rec, C, K, G)
    rec.touched_nodes, rec.pushes = len(x.touched), x.pushes
    if labels is not None:
        rec.predicted_labels = labels.predicted_count
    _check_locality(rec, G, x, sink)
    return rec


def _pagerank(G, K, seeds, total_mass, alphas, labels, rec: TrialRecord, normalize=True):
    """Line search over teleportation by sweep conductance, then score the best sweep set."""
    cache = {}

    def evaluate(cfg):
        res = solve_appr(G, cfg, labels)
        C, phi = sweep_cut(G, res, normalize) if len(res) else (np.zeros(0, np.int64), math.inf)
        cache[cfg.alpha] = (res, C)
        return phi

    cfg, a = default_appr_config(G, seeds, total_mass, alphas, evaluate, labels)
    if a not in cache:
        evaluate(cfg)
    res, C = cache[a]
    rec.pr_alpha, rec.theta = a, total_mass
    _fill(rec, C, K, G)
    rec.touched_nodes, rec.pushes = len(res.touched), res.pushes
    if labels is not None:
        rec.predicted_labels = labels.predicted_count
    return rec


def _timed(fn, rec: TrialRecord, trial: int) -> TrialRecord:
    t0 = time.perf_counter()
    try:
        fn(rec)
    except Exception as exc:  # one failed method must not sink the batch
        rec.error = f"trial {trial}: {type(exc).__name__}: {exc}"
    rec.runtime_ms = 1000 * (time.perf_counter() - t0)
    return rec


# ---------------------------------------------------------------- synthetic

def _synthetic_point(cfg: ExperimentConfig, pi: int, pt: dict, t: int, graphs: dict):
    k, c = pt.get("k", cfg.k), pt.get("c", cfg.c)
    p, q = pt.get("p", cfg.p), pt.get("q", cfg.q)
    a0, a1 = pt.get("a0", cfg.a0), pt.get("a1", cfg.a1)
    key = (k, c, p, q)
    if key not in graphs:
        rng_g, _ = trial_rng(cfg.master_seed, t)
        graphs[key] = generate_sbm(k, c, p, q, rng_g)
    G, clusters = graphs[key]
    _, rng = trial_rng(cfg.master_seed, t)
    b = int(rng.integers(c))
    K = clusters[b]
    seed = int(rng.choice(K))
    y = generate_noisy_labels(K, G.n, a0, a1, rng)
    note = ""
    if cfg.seed_from == "positive":
        pos = K[y[K] == 1]
        if len(pos):
            seed = int(rng.choice(pos))
        else:
            note = "no label-1 node in K; seed drawn from K"
    sink = _sink(cfg, real=False)

    def base(method, eps=NAN):
        return TrialRecord(pi, t, b, method, seed, p, q, a0, a1, eps, note=note)

    vol = float(G.degrees[K].sum())
    jobs = _Jobs(cfg, t, base)
    for m in cfg.methods:
        if m == "LABELS":
            jobs.add("LABELS", NAN, lambda r: _fill(r, np.flatnonzero(y == 1), K, G))
            continue
        if m not in ("FD", "LFD", "PR", "LPR"):
            continue
        oracles = [(m, None)] if m in ("FD", "PR") else [
            (_lfd_name(m, e, cfg), e) for e in _eps_values(cfg)]
        for name, e in oracles:
            make = (lambda: None) if e is None else (lambda e=e: LabelOracle(y, e))
            eps = NAN if e is None else e
            if m in ("PR", "LPR"):
                jobs.sweep(name, eps, True, lambda r, nz, make=make: _pagerank(
                    G, K, [seed], cfg.alpha * vol, cfg.pr_alphas, make(), r, nz),
                    alpha=cfg.alpha)
                continue
            if cfg.select in ("oracle", "both"):
                jobs.add(name, eps, lambda r, make=make: _best_support(
                    G, K, seed, k, cfg.alpha_grid, sink, cfg.tolerance, make(), r))
            if cfg.select in ("sweep", "both"):
                label = name + "+sweep" if cfg.select == "both" else name
                jobs.sweep(label, eps, False, lambda r, nz, make=make: _sweep_diffusion(
                    G, K, {seed: cfg.alpha * k}, sink, cfg.tolerance, make(), r, nz),
                    alpha=cfg.alpha, theta=cfg.alpha * k)
    return jobs.records


class _Jobs:
    """Collects timed method runs, adding the other sweep ordering on request."""

    def __init__(self, cfg, trial, base):
        self.cfg, self.trial, self.base = cfg, trial, base
        self.records: list[TrialRecord] = []

    def add(self, name, eps, fn, **fields):
        rec = self.base(name, eps)
        for key, val in fields.items():
            setattr(rec, key, val)
        self.records.append(_timed(fn, rec, self.trial))

    def sweep(self, name, eps, normalize, fn, **fields):
        self.add(name, eps, lambda r: fn(r, normalize), **fields)
        if self.cfg.sweep_both:
            suffix = "/raw" if normalize else "/deg"
            self.add(name + suffix, eps, lambda r: fn(r, not normalize), **fields)


# ---------------------------------------------------------- attributed data

@lru_cache(maxsize=4)
def _cached_dataset(edges, features, clusters):
    return load_dataset(edges, features, clusters)


def _attributed_instance(cfg: ExperimentConfig, pt: dict, t: int):
    """Graph, features and candidate clusters for one trial."""
    if cfg.edges:
        ds = _cached_dataset(cfg.edges, cfg.features, cfg.clusters_path)
        clusters = ds.clusters
        ids = cfg.clusters if cfg.clusters is not None else sorted(clusters)
        return ds.graph, ds.features, {c: clusters[c] for c in ids}, False
    rng_g, _ = trial_rng(cfg.master_seed, t)
    k, c = pt.get("k", cfg.k), pt.get("c", cfg.c)
    G, clusters, X = attributed_sbm(k, c, pt.get("p", cfg.p), pt.get("q", cfg.q), rng_g,
                                    sigma=cfg.sigma, separation=cfg.separation)
    return G, X, dict(enumerate(clusters)), True


def _label_oracle(model, X, n, eps, global_predict):
    if global_predict:
        return LabelOracle(predict_labels(model, X), eps)
    return LabelOracle.lazy(n, eps, lambda nodes: predict_labels(model, X, nodes))


def _seed_source(seeds, total, cfg: ExperimentConfig) -> dict:
    each = total if cfg.seed_mass == "per_seed" else total / len(seeds)
    return {int(s): each for s in seeds}


def _attributed_cluster(cfg, pi, t, G, X, b, K, rng, unsupervised):
    sink = _sink(cfg, real=True)
    vol = float(G.degrees[K].sum())
    total = cfg.alpha * vol

    def base(method, eps=NAN):
        return TrialRecord(pi, t, b, method, -1, eps=eps)

    if unsupervised:
        seed = int(rng.choice(K))
        pseudo = None
        for mult in range(2, 11):
            try:
                pseudo = pseudo_label_pipeline(G, X, seed, mult * vol, cfg.pseudo_m, rng,
                                               sink=sink, tolerance=cfg.tolerance,
                                               lam=cfg.lam, iters=cfg.iters, step=cfg.step)
                break
            except InsufficientSupport:
                continue
        if pseudo is None:
            raise InsufficientSupport("support stayed below m up to ten times vol(K)")
        model, seeds = pseudo.model, pseudo.pos
    else:
        seed = -1
        pos = rng.choice(K, size=min(cfg.n_train, len(K)), replace=False)
        neg = sample_outside(G.n, K, cfg.n_train, rng)
        model = train_logistic(X, pos, neg, lam=cfg.lam, iters=cfg.iters, step=cfg.step)
        seeds = np.sort(pos)
    multi = _seed_source(seeds, total, cfg)

    def make(e):
        return lambda: _label_oracle(model, X, G.n, e, cfg.global_predict)

    jobs = _Jobs(cfg, t, base)
    mass = dict(alpha=cfg.alpha, theta=total)
    for m in cfg.methods:
        if m == "CLF":
            jobs.add("CLF", NAN, lambda r: _fill(r, np.flatnonzero(predict_labels(model, X) == 1),
                                                 K, G))
        elif m == "FD":
            if unsupervised:
                jobs.sweep("FD", NAN, False, lambda r, nz: _sweep_diffusion(
                    G, K, {seed: total}, sink, cfg.tolerance, None, r, nz), seed_node=seed, **mass)
            jobs.sweep("FD-multi" if unsupervised else "FD", NAN, False,
                       lambda r, nz: _sweep_diffusion(G, K, multi, sink, cfg.tolerance, None, r, nz),
                       **mass)
        elif m == "LFD":
            for e in _eps_values(cfg):
                jobs.sweep(_lfd_name("LFD", e, cfg), e, False,
                           lambda r, nz, o=make(e): _sweep_diffusion(
                               G, K, multi, sink, cfg.tolerance, o(), r, nz), **mass)
        elif m == "PR":
            if unsupervised:
                jobs.sweep("PR", NAN, True, lambda r, nz: _pagerank(
                    G, K, [seed], total, cfg.pr_alphas, None, r, nz), seed_node=seed, **mass)
            jobs.sweep("PR-multi" if unsupervised else "PR", NAN, True,
                       lambda r, nz: _pagerank(G, K, seeds, total, cfg.pr_alphas, None, r, nz),
                       **mass)
        elif m == "LPR":
            for e in _eps_values(cfg):
                jobs.sweep(_lfd_name("LPR", e, cfg), e, True,
                           lambda r, nz, o=make(e): _pagerank(
                               G, K, seeds, total, cfg.pr_alphas, o(), r, nz), **mass)
    return jobs.records


def _attributed_point(cfg, pi, pt, t, unsupervised):
    G, X, clusters, generated = _attributed_instance(cfg, pt, t)
    _, rng = trial_rng(cfg.master_seed, t)
    if X is None:
        raise ValueError("attributed experiments need node features")
    if generated:
        b = int(rng.integers(len(clusters)))
        targets = [(b, clusters[b])]
    else:
        targets = list(clusters.items())
    out = []
    for b, K in targets:
        try:
            out += _attributed_cluster(cfg, pi, t, G, X, b, K, rng, unsupervised)
        except Exception as exc:
            out.append(TrialRecord(pi, t, int(b), "*",
                                   error=f"trial {t}: {type(exc).__name__}: {exc}"))
    return out


# ------------------------------------------------------------------ driver

def run_trial(cfg: ExperimentConfig, t: int) -> list[TrialRecord]:
    """All records of trial ``t`` across every point of the config."""
    out = []
    graphs: dict = {}
    for pi, pt in enumerate(cfg.point_list()):
        try:
            if cfg.mode in ("synthetic", "conjectures"):
                out += _synthetic_point(cfg, pi, pt, t, graphs)
            else:
                out += _attributed_point(cfg, pi, pt, t, cfg.mode == "unsupervised")
        except Exception as exc:
            out.append(TrialRecord(pi, t, -1, "*", error=f"trial {t}: {type(exc).__name__}: {exc}"))
    return out


def run_theory(cfg: ExperimentConfig) -> list[TheoryRecord]:
    rows = []
    d1, d2, d3 = cfg.deltas
    e1, e2, e3 = cfg.epsilons
    for pi, pt in enumerate(cfg.point_list()):
        k, c = pt.get("k", cfg.k), pt.get("c", cfg.c)
        p, q = pt.get("p", cfg.p), pt.get("q", cfg.q)
        a0, a1 = pt.get("a0", cfg.a0), pt.get("a1", cfg.a1)
        n = k * c
        params = ModelParams(n, k, p, q, a0, a1, d1, d2, d3, e1, e2, e3)
        f1_lo, a0_thr = bounds_simplified(params)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fb = bounds_formal(params)
        cm = conjecture_margins(n, k, p, q, a0, a1)
        row = TheoryRecord(
            pi, n, k, p, q, a0, a1, params.gamma, f1_lo, a0_thr, fb.f1_lower, fb.a0_threshold,
            fb.theta_dagger, fb.r, fb.r_prime, fb.fp_lower, fb.fp_upper, fb.hypotheses_hold,
            fd_f1_upper(params), labels_f1_closed_form(n, k, a0, a1),
            cm.c1_lhs, cm.c1_rhs, cm.c1_holds, cm.c2_lhs, cm.c2_rhs, cm.c2_holds)
        if cfg.monte_carlo_trials:
            spec = ModelSpec(n, k, p, q, ("sbm_blocks", k, p, q) if c > 1 else ("none",))
            rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, pi]))
            rep = monte_carlo_verify(spec, a0, a1, cfg.monte_carlo_trials, rng,
                                     tuple(cfg.deltas), tuple(cfg.epsilons)).summary()
            row.mc_trials = cfg.monte_carlo_trials
            row.l1_failures, row.l2_failures = rep["l1_failures"], rep["l2_failures"]
            row.l3_failures = rep["l3_failures"]
            row.mean_cut_ratio = rep["mean_cut_ratio"]
            row.mean_internal_ratio = rep["mean_internal_ratio"]
            row.expected_cut_ratio = rep["expected_cut_ratio"]
            row.expected_internal_ratio = rep["expected_internal_ratio"]
        rows.append(row)
    return rows


def run_experiment(cfg: ExperimentConfig) -> list:
    """Run every trial of ``cfg``; records come back sorted by point, trial and method."""
    if cfg.mode == "theory":
        return run_theory(cfg)
    trials = range(cfg.trials)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            chunks = list(ex.map(run_trial, [cfg] * cfg.trials, trials))
    else:
        chunks = [run_trial(cfg, t) for t in trials]
    records = [r for chunk in chunks for r in chunk]
    order = {m: i for i, m in enumerate(dict.fromkeys(r.method for r in records))}
    records.sort(key=lambda r: (r.point, r.trial, r.cluster, order[r.method]))
    return records
