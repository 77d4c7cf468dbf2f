"""Noisy binary node labels, their accuracy, and label-based edge reweighting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, as_node_array


@dataclass(frozen=True)
class LabelAccuracy:
    """Fraction of correct labels outside (``a0``) and inside (``a1``) the target."""

    a0: float
    a1: float

    @property
    def better_than_chance(self) -> bool:
        return self.a0 >= 0.5 and self.a1 >= 0.5


def _check_labels(labels, n=None) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if n is not None and len(y) != n:
        raise ValueError(f"expected {n} labels, got {len(y)}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    return y.astype(np.int8)


def label_accuracy(labels, K) -> LabelAccuracy:
    y = _check_labels(labels)
    n = len(y)
    K = as_node_array(K, n)
    if len(K) == 0 or len(K) == n:
        raise ValueError("target set must be nonempty and a proper subset")
    inside = np.zeros(n, dtype=bool)
    inside[K] = True
    a1 = np.count_nonzero(y[inside] == 1) / len(K)
    a0 = np.count_nonzero(y[~inside] == 0) / (n - len(K))
    return LabelAccuracy(a0=a0, a1=a1)


def flip_count(size: int, accuracy: float) -> int:
    """Nearest integer to ``(1 - accuracy) * size``; halves round down."""
    x = (1.0 - accuracy) * size
    # tolerance absorbs representation error such as (1 - 0.7) * 9500
    return max(0, int(math.ceil(x - 0.5 - 1e-9 * max(1.0, x))))


def generate_noisy_labels(K, n: int, a0: float, a1: float, rng: np.random.Generator) -> np.ndarray:
    """Indicator of ``K`` with an exact number of labels flipped on each side."""
    if not (0.0 <= a0 <= 1.0 and 0.0 <= a1 <= 1.0):
        raise ValueError("label accuracies must lie in [0, 1]")
    K = as_node_array(K, n)
    y = np.zeros(n, dtype=np.int8)
    y[K] = 1
    inside = np.zeros(n, dtype=bool)
    inside[K] = True
    outside = np.flatnonzero(~inside)
    flip_in = rng.choice(K, size=flip_count(len(K), a1), replace=False)
    flip_out = rng.choice(outside, size=flip_count(len(outside), a0), replace=False)
    y[flip_in] = 0
    y[flip_out] = 1
    return y


def edge_multipliers(G: Graph, labels, eps: float) -> np.ndarray:
    y = _check_labels(labels, G.n)
    rows = np.repeat(np.arange(G.n), G.degrees)
    return np.where(y[rows] == y[G.indices], 1.0, eps)


def reweight(G: Graph, labels, eps: float) -> Graph:
    """Scale every cross-label edge weight by ``eps``.

    Topology is unchanged, so ``eps = 0`` leaves zero-weight edges behind.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    return G.with_weights(G.weights * edge_multipliers(G, labels, eps))


def labels_f1(labels, K) -> float:
    """F1 of the positively labelled set against ``K``."""
    y = _check_labels(labels)
    K = as_node_array(K, len(y))
    tp = int(np.count_nonzero(y[K] == 1))
    fp = int(np.count_nonzero(y == 1)) - tp
    fn = len(K) - tp
    return 2 * tp / (2 * tp + fp + fn) if tp else 0.0


def read_labels(path, n: int | None = None, id_map: dict | None = None) -> np.ndarray:
    """Read ``node_id label`` lines. ``id_map`` translates raw ids to dense ones."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise ValueError(f"{path}:{lineno}: expected 'node_id label' with label 0 or 1")
            node = int(parts[0])
            if id_map is not None:
                if node not in id_map:
                    raise ValueError(f"{path}:{lineno}: unknown node id {node}")
                node = id_map[node]
            pairs.append((node, int(parts[1])))
    size = n if n is not None else (max(p[0] for p in pairs) + 1 if pairs else 0)
    y = np.zeros(size, dtype=np.int8)
    for node, lab in pairs:
        if not 0 <= node < size:
            raise ValueError(f"{path}: node id {node} out of range")
        y[node] = lab
    return y


def write_labels(path, labels) -> None:
    y = _check_labels(labels)
    with open(path, "w", newline="\n") as fh:
        for i, lab in enumerate(y):
            fh.write(f"{i} {int(lab)}\n")
