"""Logistic regression on node attributes, used as a noisy label source."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .flow import DiffusionProblem, Embedding, solve_flow_diffusion
from .graph import Graph


class InsufficientSupport(RuntimeError):
    """Diffusion support too small to pick the requested pseudo-positives."""


@dataclass
class LinearModel:
    """Logistic model acting on standardised features.

    ``mean`` and ``scale`` come from the training rows only.
    """

    weights: np.ndarray
    bias: float
    lam: float
    mean: np.ndarray
    scale: np.ndarray
    meta: dict = field(default_factory=dict)

    def decision(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.weights):
            raise ValueError(f"feature dimension {X.shape[1]} != model dimension {len(self.weights)}")
        return ((X - self.mean) / self.scale) @ self.weights + self.bias

    def to_json(self) -> str:
        d = asdict(self)
        for key in ("weights", "mean", "scale"):
            d[key] = np.asarray(d[key]).tolist()
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        d = json.loads(text)
        for key in ("weights", "mean", "scale"):
            d[key] = np.asarray(d[key], dtype=np.float64)
        return cls(**d)


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z)))


def logistic_loss(w, b, Z, t, lam):
    """Mean log-loss plus ``lam/2 ||w||^2``; the bias is not penalised."""
    s = Z @ w + b
    return float(np.mean(np.logaddexp(0.0, s) - t * s) + 0.5 * lam * w @ w)


def logistic_grad(w, b, Z, t, lam):
    err = sigmoid(Z @ w + b) - t
    return Z.T @ err / len(t) + lam * w, float(err.mean())


def train_logistic(features, pos, neg, lam: float = 1e-2, iters: int = 500,
                   step: float = 0.1, rng: np.random.Generator | None = None,
                   init_scale: float = 0.0) -> LinearModel:
    """Full-batch gradient descent on the regularised logistic loss.

    Only the rows in ``pos`` and ``neg`` are read. The step is halved
    whenever it would raise the loss, so the loss never increases.
    ``rng`` only matters when ``init_scale`` is nonzero.
    """
    pos = np.unique(np.asarray(pos, dtype=np.int64))
    neg = np.unique(np.asarray(neg, dtype=np.int64))
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("both classes need at least one example")
    if np.intersect1d(pos, neg).size:
        raise ValueError("positive and negative sets overlap")
    rows = np.concatenate([pos, neg])
    X = np.asarray(features[rows], dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    t = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - mean) / scale

    w = np.zeros(X.shape[1])
    if init_scale:
        w = init_scale * (rng or np.random.default_rng(0)).standard_normal(X.shape[1])
    b = 0.0
    loss = logistic_loss(w, b, Z, t, lam)
    history = [loss]
    lr = step
    for _ in range(iters):
        gw, gb = logistic_grad(w, b, Z, t, lam)
        while True:
            w_new, b_new = w - lr * gw, b - lr * gb
            new = logistic_loss(w_new, b_new, Z, t, lam)
            if new <= loss or lr < 1e-12:
                break
            lr *= 0.5
        if new > loss:
            break
        w, b, loss = w_new, b_new, new
        history.append(loss)
    meta = {"iters": iters, "step": step, "final_step": lr, "loss": history}
    return LinearModel(w, float(b), lam, mean, scale, meta)


def predict_labels(model: LinearModel, features, nodes=None) -> np.ndarray:
    """Label 1 where the decision value is >= 0 (probability >= 1/2)."""
    X = features if nodes is None else features[np.asarray(nodes, dtype=np.int64)]
    return (model.decision(X) >= 0).astype(np.int8)


def top_nodes(x: Embedding, m: int) -> np.ndarray:
    """The ``m`` largest entries of ``x``, ties by ascending id."""
    order = np.lexsort((x.nodes, -x.values))
    return x.nodes[order[:m]]


def sample_outside(n: int, exclude: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` distinct nodes drawn uniformly from outside ``exclude``."""
    exclude = np.asarray(exclude, dtype=np.int64)
    if n - len(exclude) < m:
        raise InsufficientSupport("not enough nodes outside the support to sample negatives")
    if len(exclude) > n // 2:
        pool = np.setdiff1d(np.arange(n), exclude)
        return np.sort(rng.choice(pool, size=m, replace=False))
    banned = set(exclude.tolist())
    picked: list[int] = []
    seen = set()
    while len(picked) < m:
        for v in rng.integers(0, n, size=2 * (m - len(picked))):
            v = int(v)
            if v not in banned and v not in seen:
                seen.add(v)
                picked.append(v)
                if len(picked) == m:
                    break
    return np.sort(np.array(picked, dtype=np.int64))


@dataclass
class PseudoLabels:
    model: LinearModel
    pos: np.ndarray
    neg: np.ndarray
    embedding: Embedding

    def predictor(self, features):
        """Callback for :class:`~labeldiffusion.flow.LabelOracle`."""
        return lambda nodes: predict_labels(self.model, features, nodes)


def pseudo_label_pipeline(G: Graph, features, seed: int, theta: float, m: int = 100,
                          rng: np.random.Generator | None = None, sink=1.0,
                          tolerance: float = 1e-6, **train_kw) -> PseudoLabels:
    """Train a classifier from one seed with no ground truth.

    Diffuse ``theta`` mass from ``seed`` in ``G``; the ``m`` highest-scoring
    nodes become positives and ``m`` nodes drawn uniformly from outside the
    support become negatives.

    Raises:
        InsufficientSupport: the support has fewer than ``m`` nodes.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    rng = rng or np.random.default_rng(0)
    x = solve_flow_diffusion(DiffusionProblem(G, {seed: theta}, sink=sink, tolerance=tolerance))
    if len(x) < m:
        raise InsufficientSupport(
            f"support has {len(x)} nodes, fewer than m={m}; increase the source mass")
    pos = np.sort(top_nodes(x, m))
    neg = sample_outside(G.n, x.nodes, m, rng)
    model = train_logistic(features, pos, neg, rng=rng, **train_kw)
    return PseudoLabels(model, pos, neg, x)
