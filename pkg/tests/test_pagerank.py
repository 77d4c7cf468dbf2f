import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labeldiffusion.flow import LabelOracle, NonConvergence
from labeldiffusion.graph import build_graph
from labeldiffusion.labels import reweight
from labeldiffusion.models import generate_sbm
from labeldiffusion.pagerank import (DegenerateSeed, PageRankConfig, default_appr_config,
                                     degree_seed_scores, residual_ratio, solve_appr)


def reference_push(G, seeds, alpha, rho):
    """Plain-python FIFO push used as an independent check.

    A node whose degree has not been looked up yet (never popped, not a
    seed) joins the queue as soon as it receives residual and is skipped on
    pop if it turns out to be below threshold.
    """
    p = np.zeros(G.n)
    r = np.zeros(G.n)
    d = G.weighted_degrees
    known = set(seeds)
    queue = []
    for s, v in sorted(seeds.items()):
        r[s] = v
        if r[s] > rho * d[s]:
            queue.append(s)
    while queue:
        i = queue.pop(0)
        known.add(i)
        ri = r[i]
        if ri <= rho * d[i]:
            continue
        p[i] += alpha * ri
        r[i] = 0.0
        for j, w in zip(G.neighbors(i), G.incident_weights(i)):
            r[j] += (1 - alpha) * ri * w / d[i]
            if j not in queue and (j not in known or r[j] > rho * d[j]):
                queue.append(j)
    return p, r


def test_large_rho_leaves_seed_untouched():
    G = build_graph(2, [(0, 1)])
    res = solve_appr(G, PageRankConfig(0.5, 10.0, {0: 1.0}))
    assert len(res) == 0
    assert res.residual == {0: 1.0}


def test_single_edge_push_sequence():
    G = build_graph(2, [(0, 1)])
    with pytest.raises(NonConvergence):
        solve_appr(G, PageRankConfig(0.5, 0.01, {0: 1.0}, max_pushes=1))
    res = solve_appr(G, PageRankConfig(0.5, 0.01, {0: 1.0}))
    p, r = reference_push(G, {0: 1.0}, 0.5, 0.01)
    assert res.dense(2) == pytest.approx(p)
    assert res.as_dict()[0] >= 0.5
    assert max(res.residual.values()) <= 0.01


def test_matches_reference_push_on_sbm():
    G, clusters = generate_sbm(30, 4, 0.3, 0.05, np.random.default_rng(0))
    seeds = degree_seed_scores(G, [0, 1, 2])
    res = solve_appr(G, PageRankConfig(0.15, 1e-3, seeds))
    p, r = reference_push(G, seeds, 0.15, 1e-3)
    assert np.allclose(res.dense(G.n), p, rtol=1e-12, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.05, 0.9), st.floats(1e-4, 1e-2))
def test_residual_contract_and_mass(seed, alpha, rho):
    rng = np.random.default_rng(seed)
    G, clusters = generate_sbm(20, 3, 0.4, 0.05, rng)
    seeds = [int(s) for s in rng.choice(G.n, 2, replace=False) if G.degree(int(s))]
    if not seeds:
        return
    y = (rng.random(G.n) < 0.5).astype(np.int8)
    for labels in (None, LabelOracle(y, 0.2)):
        cfg = PageRankConfig(alpha, rho, degree_seed_scores(G, seeds, labels))
        res = solve_appr(G, cfg, labels)
        assert residual_ratio(G, res, labels) <= rho * (1 + 1e-12)
        total = res.total + sum(res.residual.values())
        assert total == pytest.approx(1.0, rel=1e-9)
        assert np.all(res.values >= 0)


def test_labelled_run_equals_reweighted_graph():
    rng = np.random.default_rng(4)
    G, _ = generate_sbm(30, 3, 0.3, 0.05, rng)
    y = (rng.random(G.n) < 0.5).astype(np.int8)
    cfg = PageRankConfig(0.1, 1e-4, {0: 1.0})
    a = solve_appr(G, cfg, LabelOracle(y, 0.1))
    b = solve_appr(reweight(G, y, 0.1), cfg)
    assert np.allclose(a.dense(G.n), b.dense(G.n))


def test_degenerate_seed():
    G = build_graph(3, [(1, 2)])
    with pytest.raises(DegenerateSeed):
        solve_appr(G, PageRankConfig(0.1, 1e-3, {0: 1.0}))


def test_config_validation():
    for bad in [dict(alpha=0.0), dict(alpha=1.0), dict(rho=0.0), dict(seed_scores={0: -1.0})]:
        kw = dict(alpha=0.1, rho=1e-3, seed_scores={0: 1.0}) | bad
        with pytest.raises(ValueError):
            PageRankConfig(**kw)


def test_default_config_rules():
    G = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    cfg, a = default_appr_config(G, [1], 2000.0)
    assert cfg.rho == pytest.approx(5e-4)
    assert cfg.seed_scores == {1: 1.0}
    scores = degree_seed_scores(G, [0, 3])
    assert scores == pytest.approx({0: 2 / 3, 3: 1 / 3})
    cfg, a = default_appr_config(G, [1], 10.0, (0.9, 0.5, 0.1), evaluate=lambda c: 1.0)
    assert a == 0.1
    cfg, a = default_appr_config(G, [1], 10.0, (0.1, 0.5), evaluate=lambda c: -c.alpha)
    assert a == 0.5
    with pytest.raises(ValueError):
        default_appr_config(G, [], 10.0)
    with pytest.raises(ValueError):
        default_appr_config(G, [1], 0.0)
