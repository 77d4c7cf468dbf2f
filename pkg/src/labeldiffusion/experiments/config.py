"""Experiment configuration."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

MODES = ("synthetic", "supervised", "unsupervised", "theory", "conjectures")
METHODS = ("FD", "LFD", "PR", "LPR", "LABELS", "CLF")

ALPHA_GRID = tuple(2 + 0.25 * i for i in range(9))
HYPER_ALPHAS = (2.0, 3.0, 4.0, 5.0)
HYPER_EPS = (0.01, 0.025, 0.05, 0.075, 0.1, 0.2)

# (p, q, a0, a1) settings contrasting zero and positive cross-label weight
CONJECTURE_ROWS = (
    {"p": 0.05, "q": 0.0015, "a0": 0.7, "a1": 0.6},
    {"p": 0.05, "q": 0.0015, "a0": 0.6, "a1": 0.65},
    {"p": 0.05, "q": 0.0075, "a0": 0.8, "a1": 0.7},
    {"p": 0.05, "q": 0.0075, "a0": 0.9, "a1": 0.9},
)


@dataclass
class ExperimentConfig:
    mode: str = "synthetic"
    methods: list = field(default_factory=lambda: ["FD", "LFD", "LABELS"])
    trials: int = 10
    master_seed: int = 0
    eps: float = 0.05
    # extra eps values run as separately named LFD/LPR methods
    eps_list: list = field(default_factory=list)
    # model
    k: int = 500
    c: int = 20
    p: float = 0.05
    q: float = 0.025
    a0: float = 0.7
    a1: float = 0.7
    # each point overrides model/label fields; empty means one point from the fields above
    points: list = field(default_factory=list)
    # source mass: synthetic uses alpha * k, real-data modes alpha * vol(K)
    alpha: float = 2.0
    alpha_grid: list = field(default_factory=lambda: list(ALPHA_GRID))
    # oracle: best-F1 support over alpha_grid; sweep: fixed alpha then sweep cut
    select: str = "oracle"
    # also report the sweep ordering that is not the method's default
    sweep_both: bool = False
    # None: unit capacity for synthetic modes, degree capacity on attributed data
    sink: object = None
    # synthetic seed: "cluster" draws it uniformly from K, "positive" from the
    # label-1 part of K; None means "positive" for conjectures, else "cluster"
    seed_from: str | None = None
    tolerance: float = 1e-6
    # PageRank
    pr_alphas: list = field(default_factory=lambda: [0.01, 0.05, 0.1, 0.2, 0.3])
    # real data
    edges: str | None = None
    features: str | None = None
    clusters_path: str | None = None
    clusters: list | None = None
    n_train: int = 25
    pseudo_m: int = 100
    seed_mass: str = "total"
    global_predict: bool = False
    lam: float = 1e-2
    iters: int = 500
    step: float = 0.1
    # attributed SBM used when no dataset is given for the real-data modes
    sigma: float = 1.0
    separation: float = 2.0
    # theory
    deltas: list = field(default_factory=lambda: [0.5, 0.5, 0.5])
    epsilons: list = field(default_factory=lambda: [1.0, 1.0, 1.0])
    monte_carlo_trials: int = 0
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.methods = [m.upper() for m in self.methods]
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")
        if not 0.0 <= self.eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")
        if self.select not in ("oracle", "sweep", "both"):
            raise ValueError("select must be 'oracle', 'sweep' or 'both'")
        if self.seed_from is None:
            self.seed_from = "positive" if self.mode == "conjectures" else "cluster"
        if self.seed_from not in ("cluster", "positive"):
            raise ValueError("seed_from must be 'cluster' or 'positive'")
        if self.seed_mass not in ("total", "per_seed"):
            raise ValueError("seed_mass must be 'total' or 'per_seed'")
        if self.mode in ("supervised", "unsupervised") and self.edges and not self.clusters_path:
            raise ValueError(f"{self.mode} mode needs a cluster file next to the edge list")
        if self.mode == "unsupervised" and self.edges and not self.features:
            raise ValueError("unsupervised mode needs node features")

    def point_list(self) -> list[dict]:
        if self.mode == "conjectures" and not self.points:
            return [dict(r) for r in CONJECTURE_ROWS]
        return [dict(pt) for pt in self.points] or [{}]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


def config_from_dict(d: dict) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    return ExperimentConfig(**d)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if not isinstance(d, dict):
        raise ValueError("config file must hold a JSON object")
    return config_from_dict(d)
