import csv
import json
import subprocess
import sys

import pytest

from labeldiffusion.cli import build_parser, main, resolve_config

FAST = ["--k", "40", "--c", "4", "--p", "0.3", "--q", "0.01", "--trials", "2"]


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_synthetic_writes_records_and_summary(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["synthetic", *FAST, "--methods", "fd,lfd,labels", "--out", str(out)]) == 0
    recs = rows(out)
    assert len(recs) == 6
    assert [r["method"] for r in recs[:3]] == ["FD", "LFD", "LABELS"]
    summary = rows(tmp_path / "r_summary.csv")
    assert [s["method"] for s in summary] == ["FD", "LABELS", "LFD"]
    assert all(s["count"] == "2" for s in summary)
    assert b"\r\n" not in out.read_bytes()


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["synthetic", *FAST, "--methods", "lfd,pr", "--seed", "7"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    strip = [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows(a)]
    assert strip == [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows(b)]


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "synthetic", "k": 40, "c": 4, "p": 0.3, "q": 0.01,
                               "trials": 5, "methods": ["LABELS"]}))
    echo = tmp_path / "echo.json"
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(cfg), "--trials", "1", "--echo-config", str(echo),
                 "--out", str(out)]) == 0
    resolved = json.loads(echo.read_text())
    assert resolved["trials"] == 1 and resolved["k"] == 40
    assert len(rows(out)) == 1


def test_unknown_config_key_is_reported(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "synthetic", "bogus": 1}))
    assert main(["run", "--config", str(cfg)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_conjectures_defaults():
    args = build_parser().parse_args(["conjectures", "--trials", "1"])
    cfg = resolve_config(args)
    assert cfg.mode == "conjectures"
    assert cfg.eps_list == [0.0, 0.2] and cfg.methods == ["FD", "LFD"]
    assert len(cfg.point_list()) == 4
    assert cfg.seed_from == "positive"


def test_conjectures_seed_policy_from_config(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"mode": "synthetic", "trials": 1}))
    cfg = resolve_config(build_parser().parse_args(["conjectures", "--config", str(path)]))
    assert cfg.seed_from == "positive"
    args = ["conjectures", "--config", str(path), "--seed-from", "cluster"]
    assert resolve_config(build_parser().parse_args(args)).seed_from == "cluster"


def test_theory_subcommand(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["theory", "--out", str(out)]) == 0
    (row,) = rows(out)
    assert row["hypotheses_hold"] == "False"
    assert float(row["gamma"]) == pytest.approx(24.95 / 237.5)
    assert not (tmp_path / "t_summary.csv").exists()


def test_sweep_hyper_grid(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["sweep-hyper", *FAST[:-2], "--trials", "1", "--methods", "lfd",
                 "--alphas", "2,3", "--eps-grid", "0.05,0.1", "--out", str(out)]) == 0
    recs = rows(out)
    assert sorted((r["alpha"], r["method"]) for r in recs) == [
        ("2.0", "LFD(eps=0.05)"), ("2.0", "LFD(eps=0.1)"),
        ("3.0", "LFD(eps=0.05)"), ("3.0", "LFD(eps=0.1)")]
    summary = rows(tmp_path / "h_summary.csv")
    assert list(summary[0])[:3] == ["alpha", "point", "method"]


def test_stdout_and_module_entry():
    res = subprocess.run([sys.executable, "-m", "labeldiffusion.cli", "synthetic", *FAST,
                          "--trials", "1", "--methods", "labels"],
                         capture_output=True, text=True, check=True)
    header = res.stdout.splitlines()[0]
    assert header.startswith("point,trial,cluster,method")


def test_bad_method_exit_code(capsys):
    assert main(["synthetic", "--methods", "gcn"]) == 2
    assert "unknown methods" in capsys.readouterr().err
