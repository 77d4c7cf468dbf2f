import json
import math

import numpy as np
import pytest

from labeldiffusion.experiments import (DatasetError, ExperimentConfig, config_from_dict,
                                        load_config, load_dataset, run_experiment, summarize)
from labeldiffusion.experiments.metrics import cluster_scores
from labeldiffusion.experiments.report import digest, to_csv
from labeldiffusion.experiments.runner import TrialRecord, run_trial, trial_rng
from labeldiffusion.labels import generate_noisy_labels
from labeldiffusion.theory import labels_f1_closed_form

SMALL = dict(k=60, c=5, p=0.3, q=0.01, trials=3)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_path_graph_from_edge_list(tmp_path):
    ds = load_dataset(write(tmp_path, "e.txt", "0 1\n1 2"))
    assert ds.graph.n == 3 and ds.graph.edge_count == 2
    assert ds.graph.neighbors(1).tolist() == [0, 2]


def test_duplicate_edges_collapse(tmp_path):
    ds = load_dataset(write(tmp_path, "e.txt", "0 1\n0 1\n"))
    assert ds.graph.edge_count == 1


def test_ids_remapped_with_comments(tmp_path):
    edges = write(tmp_path, "e.txt", "# header\n10 30\n30 20  # trailing\n")
    feats = write(tmp_path, "f.csv", "id,a,b\n20,1,2\n10,3,4\n30,5,6\n")
    labels = write(tmp_path, "l.txt", "10 7\n30 7\n20 8\n")
    ds = load_dataset(edges, feats, labels)
    assert ds.id_map == {10: 0, 30: 1, 20: 2}
    assert ds.raw_ids.tolist() == [10, 30, 20]
    assert ds.features.tolist() == [[3, 4], [5, 6], [1, 2]]
    assert {c: v.tolist() for c, v in ds.clusters.items()} == {7: [0, 1], 8: [2]}


def test_loader_errors(tmp_path):
    edges = write(tmp_path, "e.txt", "0 1\n1 2\n")
    with pytest.raises(DatasetError, match="2 feature rows for 3 nodes"):
        load_dataset(edges, write(tmp_path, "f.csv", "0,1.0\n1,2.0\n"))
    with pytest.raises(DatasetError, match=":2"):
        load_dataset(write(tmp_path, "bad.txt", "0 1\n0 x\n"))
    with pytest.raises(DatasetError, match="does not appear"):
        load_dataset(edges, None, write(tmp_path, "l.txt", "0 1\n9 1\n"))
    with pytest.raises(DatasetError, match="non-finite"):
        load_dataset(edges, write(tmp_path, "g.csv", "0,1\n1,nan\n2,3\n"))
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "missing.txt")


def test_config_rejects_unknown_keys_and_bad_values(tmp_path):
    with pytest.raises(ValueError, match="unknown config keys"):
        config_from_dict({"mode": "synthetic", "alpha_mass": 3})
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(methods=["FD", "GCN"])
    with pytest.raises(ValueError):
        ExperimentConfig(mode="offline")
    path = write(tmp_path, "c.json", json.dumps({"mode": "theory", "k": 100}))
    cfg = load_config(path)
    assert cfg.mode == "theory" and cfg.k == 100


def test_scores():
    s = cluster_scores([0, 1, 2, 5], [0, 1, 2, 3])
    assert s.f1 == pytest.approx(0.75)
    assert s.f1_paper_variant == pytest.approx(4 / 5)
    assert s.precision == 0.75 and s.recall == 0.75
    assert cluster_scores([], [1]).f1 == 0.0


def test_summary_conventions():
    one = summarize([{"point": 0, "method": "FD", "cluster": 0, "f1": 0.3}], metrics=("f1",))
    assert one[0]["f1_mean"] == 0.3 and one[0]["f1_std"] == 0.0
    rows = [{"point": 0, "method": "FD", "cluster": 0, "f1": v} for v in (0.4, 0.6)]
    two = summarize(rows, metrics=("f1",))
    assert two[0]["f1_mean"] == pytest.approx(0.5)
    assert two[0]["f1_std"] == pytest.approx(0.1)
    with pytest.raises(ValueError):
        summarize([])


def test_summary_counts_errors():
    recs = [TrialRecord(0, 0, 0, "FD", f1=0.5), TrialRecord(0, 1, 0, "FD", error="boom")]
    s = summarize(recs, keys=("method",))
    assert s[0]["count"] == 1 and s[0]["errors"] == 1 and s[0]["f1_mean"] == 0.5


def test_perfect_labels_recover_cluster():
    cfg = ExperimentConfig(methods=["FD", "LFD", "LABELS"], eps=0.01, a0=1.0, a1=1.0, **SMALL)
    recs = run_experiment(cfg)
    assert not [r.error for r in recs if r.error]
    lfd = [r.f1 for r in recs if r.method == "LFD"]
    assert np.mean(lfd) > 0.95
    assert all(r.oracle for r in recs if r.method in ("FD", "LFD"))
    assert all(r.f1 == 1.0 for r in recs if r.method == "LABELS")


def test_zero_eps_perfect_labels_cannot_hold_the_mass():
    # the cluster is cut off entirely, so any mass above k has nowhere to go
    cfg = ExperimentConfig(methods=["LFD"], eps=0.0, a0=1.0, a1=1.0, **SMALL)
    recs = run_experiment(cfg)
    assert all("InfeasibleDiffusion" in r.error for r in recs)


def test_labels_method_matches_closed_form():
    cfg = ExperimentConfig(methods=["LABELS"], a0=0.8, a1=0.7, **SMALL)
    recs = run_experiment(cfg)
    expect = labels_f1_closed_form(300, 60, 0.8, 0.7)
    for r in recs:
        assert r.f1 == pytest.approx(expect, abs=0.02)


def test_labels_follow_trial_stream():
    cfg = ExperimentConfig(methods=["LABELS"], a0=0.9, a1=0.6, **SMALL)
    rec = run_trial(cfg, 1)[0]
    _, rng = trial_rng(cfg.master_seed, 1)
    b = int(rng.integers(cfg.c))
    K = np.arange(b * 60, (b + 1) * 60)
    rng.choice(K)
    y = generate_noisy_labels(K, 300, 0.9, 0.6, rng)
    assert rec.cluster == b
    assert rec.f1 == cluster_scores(np.flatnonzero(y == 1), K).f1


def test_positive_seed_has_label_one():
    cfg = ExperimentConfig(methods=["LABELS"], a0=0.9, a1=0.6, seed_from="positive", **SMALL)
    for t in range(cfg.trials):
        rec = run_trial(cfg, t)[0]
        _, rng = trial_rng(cfg.master_seed, t)
        b = int(rng.integers(cfg.c))
        K = np.arange(b * 60, (b + 1) * 60)
        rng.choice(K)
        y = generate_noisy_labels(K, 300, 0.9, 0.6, rng)
        assert rec.seed_node == int(rng.choice(K[y[K] == 1]))
        assert y[rec.seed_node] == 1


def test_seed_policy_defaults():
    assert ExperimentConfig().seed_from == "cluster"
    assert ExperimentConfig(mode="conjectures").seed_from == "positive"
    assert ExperimentConfig(mode="conjectures", seed_from="cluster").seed_from == "cluster"
    with pytest.raises(ValueError):
        ExperimentConfig(seed_from="anywhere")


def test_deterministic_csv():
    cfg = ExperimentConfig(methods=["FD", "LFD", "PR", "LPR", "LABELS"], select="both",
                           sweep_both=True, **SMALL)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert digest(a) == digest(b)
    assert to_csv(a).count("\n") == len(a) + 1
    other = run_experiment(cfg.replace(master_seed=1))
    assert digest(other) != digest(a)


def test_parallel_matches_serial():
    cfg = ExperimentConfig(methods=["FD", "LFD"], **SMALL)
    assert digest(run_experiment(cfg)) == digest(run_experiment(cfg.replace(workers=2)))


def test_method_names_and_flags():
    cfg = ExperimentConfig(methods=["FD", "LFD", "PR"], eps_list=[0.0, 0.2], select="both",
                           sweep_both=True, **SMALL)
    names = list(dict.fromkeys(r.method for r in run_experiment(cfg)))
    assert names == ["FD", "FD+sweep", "FD+sweep/deg", "LFD(eps=0)", "LFD(eps=0)+sweep",
                     "LFD(eps=0)+sweep/deg", "LFD(eps=0.2)", "LFD(eps=0.2)+sweep",
                     "LFD(eps=0.2)+sweep/deg", "PR", "PR/raw"]


def test_locality_fields_recorded():
    cfg = ExperimentConfig(methods=["LFD"], select="sweep", **SMALL)
    for r in run_experiment(cfg):
        assert r.touched_nodes > 0 and r.pushes > 0
        assert 0 <= r.f1 <= 1 and 0 <= r.conductance <= 1
        assert r.theta == 2.0 * 60


def test_failed_trials_become_error_rows():
    # a seed-less graph: isolated target clusters with p = 0 make every method fail
    cfg = ExperimentConfig(methods=["FD", "LABELS"], k=20, c=3, p=0.0, q=0.0, trials=2,
                           alpha_grid=[2.0], select="sweep")
    recs = run_experiment(cfg)
    fd = [r for r in recs if r.method == "FD"]
    assert len(fd) == 2 and all(r.error.startswith(f"trial {r.trial}:") for r in fd)
    assert all(not r.error for r in recs if r.method == "LABELS")
    s = summarize(recs, keys=("method",))
    assert [row["errors"] for row in s] == [2, 0]


def test_unsupervised_attributed_run():
    cfg = ExperimentConfig(mode="unsupervised", methods=["FD", "LFD", "PR", "CLF"],
                           k=80, c=4, p=0.15, q=0.01, trials=2, pseudo_m=20)
    recs = run_experiment(cfg)
    assert not [r.error for r in recs if r.error]
    names = list(dict.fromkeys(r.method for r in recs))
    assert names == ["FD", "FD-multi", "LFD", "PR", "PR-multi", "CLF"]
    for r in recs:
        if r.method in ("LFD", "CLF"):
            assert r.f1 > 0.5


def test_supervised_dataset_run(tmp_path):
    rng = np.random.default_rng(0)
    from labeldiffusion.models import attributed_sbm
    G, clusters, X = attributed_sbm(40, 3, 0.3, 0.01, rng)
    i, j, _ = G.edges()
    edges = write(tmp_path, "e.txt", "".join(f"{a} {b}\n" for a, b in zip(i, j)))
    feats = write(tmp_path, "f.csv", "".join(f"{v},{float(x[0])!r},{float(x[1])!r}\n" for v, x in enumerate(X)))
    labs = write(tmp_path, "l.txt", "".join(f"{v} {c}\n" for c, K in enumerate(clusters)
                                            for v in K))
    cfg = ExperimentConfig(mode="supervised", methods=["FD", "LFD", "LPR"], trials=1,
                           edges=str(edges), features=str(feats), clusters_path=str(labs),
                           n_train=10)
    recs = run_experiment(cfg)
    assert not [r.error for r in recs if r.error]
    assert sorted({r.cluster for r in recs}) == [0, 1, 2]


def test_theory_mode_rows():
    cfg = ExperimentConfig(mode="theory", points=[{"k": 100, "c": 5, "p": 0.3, "q": 0.01}],
                           monte_carlo_trials=2)
    (row,) = run_experiment(cfg)
    assert row.n == 500 and row.mc_trials == 2
    assert not math.isnan(row.mean_cut_ratio)
