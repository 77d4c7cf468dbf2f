"""Cluster recovery scores."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Scores:
    f1: float
    f1_paper_variant: float
    precision: float
    recall: float


def cluster_scores(C, K) -> Scores:
    """Compare a recovered set ``C`` with the target ``K``.

    ``f1`` is the usual 2TP/(2TP+FP+FN). ``f1_paper_variant`` is
    |K| / (|K| + |C\\K|/2 + |K\\C|/2), which differs from ``f1`` unless
    the recovered set contains all of ``K``.
    """
    C = np.unique(np.asarray(C, dtype=np.int64))
    K = np.unique(np.asarray(K, dtype=np.int64))
    if len(K) == 0:
        raise ValueError("target set is empty")
    tp = len(np.intersect1d(C, K, assume_unique=True))
    fp = len(C) - tp
    fn = len(K) - tp
    f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    variant = len(K) / (len(K) + fp / 2 + fn / 2)
    precision = tp / len(C) if len(C) else 0.0
    return Scores(f1, variant, precision, tp / len(K))
