"""Closed-form recovery guarantees for diffusion over label-weighted graphs.

Every bound is returned raw, without clamping to [0, 1]; use
:func:`clamp01` for plotting. The asymptotic ``o_k(1)`` corrections of the
simplified bounds are not computable and are left out.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import set_stats
from .labels import generate_noisy_labels, reweight
from .models import ModelSpec, gamma, generate_local_model


@dataclass(frozen=True)
class ModelParams:
    n: int
    k: int
    p: float
    q: float
    a0: float
    a1: float
    delta1: float = 0.5
    delta2: float = 0.5
    delta3: float = 0.5
    eps1: float = 1.0
    eps2: float = 1.0
    eps3: float = 1.0

    @property
    def gamma(self) -> float:
        return gamma(self.n, self.k, self.p, self.q)

    @property
    def labels_better_than_chance(self) -> bool:
        return self.a0 >= 0.5 and self.a1 >= 0.5

    def p_requirement(self) -> float:
        k, d1, d2 = self.k, self.delta1, self.delta2
        if d1 >= 1:
            return math.inf
        a = (6 + self.eps1) / d1**2 * math.log(k) / (k - 2)
        b = (math.sqrt(8) + self.eps2) / (d2 * math.sqrt(1 - d1)) * math.sqrt(math.log(k)) / math.sqrt(k - 2)
        return max(a, b)

    def q_requirement(self) -> float:
        return (3 + self.eps3) / self.delta3**2 * math.log(self.k) / (self.n - self.k)

    def hypotheses_hold(self) -> bool:
        """Whether ``p`` and ``q`` are large enough for the formal guarantee."""
        return self.p >= self.p_requirement() and self.q >= self.q_requirement()


def clamp01(v: float) -> float:
    return min(1.0, max(0.0, v))


def f1_lower_simplified(a0: float, a1: float, gamma_: float) -> float:
    if gamma_ <= 0 or a1 <= 0:
        raise ZeroDivisionError("need gamma > 0 and a1 > 0")
    inv = 1 + (1 - a1) / 2 + (1 - a0) / (2 * gamma_) + (1 - a0) ** 2 / (2 * a1 * gamma_**2)
    return 1 / inv


def a0_threshold_simplified(p: float, gamma_: float, a1: float) -> float:
    """Smallest outside accuracy for which the weighted diffusion provably wins."""
    if gamma_ <= 0 or a1 <= 0:
        raise ZeroDivisionError("need gamma > 0 and a1 > 0")
    return 1 - (math.sqrt((p / gamma_ + 2 * a1 - 1) * a1) - a1) * gamma_


def bounds_simplified(params: ModelParams) -> tuple[float, float]:
    """``(f1_lower, a0_threshold)`` without the vanishing corrections."""
    g = params.gamma
    return (f1_lower_simplified(params.a0, params.a1, g),
            a0_threshold_simplified(params.p, g, params.a1))


@dataclass(frozen=True)
class FormalBounds:
    r: float
    r_prime: float
    theta_dagger: float
    fp_lower: float
    fp_upper: float
    f1_lower: float
    a0_threshold: float
    hypotheses_hold: bool = True


def concentration_factors(p, k, delta1, delta2, delta3) -> tuple[float, float]:
    """``(r, r')`` from the concentration slack parameters."""
    if delta1 >= 1 or delta2 >= 1 or delta3 >= 1:
        raise ZeroDivisionError("delta values of 1 make the bound degenerate")
    r = (1 + delta1) * (1 + delta1 + 2 / (p * (k - 1))) / ((1 - delta1) * (1 - delta2))
    return r, r / (1 - delta3)


def bounds_formal(params: ModelParams, gamma_: float | None = None) -> FormalBounds:
    """Exact (non-asymptotic) counterparts of :func:`bounds_simplified`.

    Also returns the source mass ``theta_dagger`` that achieves the bound
    and the false-positive bounds it rests on. If the hypotheses on ``p``
    and ``q`` fail the numbers are still computed but flagged.
    """
    n, k, p = params.n, params.k, params.p
    a0, a1 = params.a0, params.a1
    g = params.gamma if gamma_ is None else gamma_
    r, rp = concentration_factors(p, k, params.delta1, params.delta2, params.delta3)
    kappa = (k - 2) / (k - 1)
    base = a1 * g * kappa
    square = ((base + (1 - a0)) / base) ** 2
    theta = square * r * a1 * k
    fp_upper = (square * r - 1) * a1 * k
    fp_lower = (1 - params.delta3) * p * (k - 1) / g
    f1 = 1 / (1 + a1 / 2 * (square * r - 1) + (1 - a1) / 2)
    a0_thr = 1 - kappa * (math.sqrt((p / g / rp + (2 * a1 - 1) / r) * a1) - a1) * g
    ok = params.hypotheses_hold()
    if not ok:
        warnings.warn("p or q below the formal requirement; bounds carry no guarantee",
                      stacklevel=2)
    return FormalBounds(r, rp, theta, fp_lower, fp_upper, f1, a0_thr, ok)


def fd_f1_upper(params: ModelParams) -> float:
    """F1 ceiling for diffusion in the unweighted graph whenever it spreads."""
    k = params.k
    return 2 * k / (2 * k + (1 - params.delta3) * params.p * (k - 1) / params.gamma)


def labels_f1_closed_form(n: int, k: int, a0: float, a1: float) -> float:
    """F1 of the positively labelled set under exact label accuracies."""
    return 2 * a1 * k / ((a1 * k + (1 - a0) * (n - k)) + k)


@dataclass(frozen=True)
class ConjectureMargins:
    c1_lhs: float
    c1_rhs: float
    c2_lhs: float
    c2_rhs: float

    @property
    def c1_holds(self) -> bool:
        """Positive cross-label weight expected to help."""
        return self.c1_lhs > self.c1_rhs

    @property
    def c2_holds(self) -> bool:
        """Zero cross-label weight expected to help."""
        return self.c2_lhs < self.c2_rhs


def conjecture_margins(n, k, p, q, a0, a1) -> ConjectureMargins:
    return ConjectureMargins(
        c1_lhs=(1 - a1) * p * k, c1_rhs=a0 * q * (n - k),
        c2_lhs=(1 - a1) * p**2 * k, c2_rhs=a0 * q**2 * (n - k),
    )


def expected_cut_ratio(a0, a1) -> float:
    return a1 * (1 - a0) + a0 * (1 - a1)


def expected_internal_ratio(a1) -> float:
    return a1**2 + (1 - a1) ** 2


@dataclass
class LemmaReport:
    params: dict
    trials: int
    hypotheses_hold: bool
    l1_bound: float
    l2_bound: float
    l3_bound: float
    l1_failures: int = 0
    l2_failures: int = 0
    l3_failures: int = 0
    l1_prob_bound: float = 0.0
    l2_prob_bound: float = 0.0
    l3_prob_bound: float = 0.0
    cut_ratios: list = field(default_factory=list)
    internal_ratios: list = field(default_factory=list)
    min_external_degree: list = field(default_factory=list)
    max_weighted_degree: list = field(default_factory=list)
    min_path_count: list = field(default_factory=list)

    @property
    def expected_cut_ratio(self) -> float:
        return expected_cut_ratio(self.params["a0"], self.params["a1"])

    @property
    def expected_internal_ratio(self) -> float:
        return expected_internal_ratio(self.params["a1"])

    def summary(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if not isinstance(v, list)}
        out.update(
            l1_failure_rate=self.l1_failures / self.trials,
            l2_failure_rate=self.l2_failures / self.trials,
            l3_failure_rate=self.l3_failures / self.trials,
            mean_cut_ratio=float(np.mean(self.cut_ratios)),
            mean_internal_ratio=float(np.mean(self.internal_ratios)),
            expected_cut_ratio=self.expected_cut_ratio,
            expected_internal_ratio=self.expected_internal_ratio,
        )
        out.update(out.pop("params"))
        return out


def _path_counts(G, members, pairs):
    """Edge-disjoint paths of length <= 2 between each pair, inside ``members``.

    For a pair (i, j) this is [i ~ j] plus the number of neighbors of j
    (other than i) that are also neighbors of i in ``members``.
    """
    counts = np.empty(len(pairs), dtype=np.int64)
    for t, (i, j) in enumerate(pairs):
        Fi = G.neighbors(i)
        Fi = Fi[members[Fi]]
        Nj = G.neighbors(j)
        Nj = Nj[members[Nj]]
        direct = int(np.any(Fi == j))
        common = np.intersect1d(Fi[Fi != j], Nj, assume_unique=True)
        counts[t] = direct + len(common)
    return counts


def monte_carlo_verify(spec: ModelSpec, a0: float, a1: float, trials: int,
                       rng: np.random.Generator, delta=(0.5, 0.5, 0.5), eps=(1.0, 1.0, 1.0),
                       pairs: int = 200) -> LemmaReport:
    """Empirical check of the degree and connectivity concentration lemmas.

    Per trial: draw a graph and labels, then test (L1) every target node has
    external degree at least ``(1-d3) q (n-k)``; (L2) every correctly labelled
    target node has weighted degree (cross-label weight 0) at most
    ``(1+d1)(p(a1 k - 1) + (1-a0) q (n-k))``; (L3) ``pairs`` random pairs of
    correctly labelled target nodes are joined by at least
    ``(1-d1)(1-d2) p^2 (a1 k - 1)`` edge-disjoint paths of length <= 2. Cut
    and internal-volume ratios between the weighted and plain graph are
    recorded as well.
    """
    if spec.n > 20000:
        raise ValueError("monte_carlo_verify is meant for n <= 20000")
    n, k, p, q = spec.n, spec.k, spec.p, spec.q
    d1, d2, d3 = delta
    e1, e2, e3 = eps
    params = ModelParams(n, k, p, q, a0, a1, d1, d2, d3, e1, e2, e3)
    report = LemmaReport(
        params=asdict(params), trials=trials, hypotheses_hold=params.hypotheses_hold(),
        l1_bound=(1 - d3) * q * (n - k),
        l2_bound=(1 + d1) * (p * (a1 * k - 1) + (1 - a0) * q * (n - k)),
        l3_bound=(1 - d1) * (1 - d2) * p**2 * (a1 * k - 1),
        l1_prob_bound=k ** (-e3 / 3),
        l2_prob_bound=k ** (-e1 / 6),
        l3_prob_bound=2 * k ** (-e1 / 6) + k ** (-e2),
    )
    for _ in range(trials):
        G, K = generate_local_model(spec, rng)
        y = generate_noisy_labels(K, n, a0, a1, rng)
        Gw = reweight(G, y, 0.0)
        inside = np.zeros(n, dtype=bool)
        inside[K] = True

        rows = np.repeat(np.arange(n), G.degrees)
        ext = np.bincount(rows[inside[rows] & ~inside[G.indices]], minlength=n)[K]
        report.min_external_degree.append(int(ext.min()))
        report.l1_failures += int(ext.min() < report.l1_bound)

        good = K[y[K] == 1]
        wdeg = Gw.weighted_degrees[good]
        top = float(wdeg.max()) if len(good) else 0.0
        report.max_weighted_degree.append(top)
        report.l2_failures += int(top > report.l2_bound)

        members = np.zeros(n, dtype=bool)
        members[good] = True
        if len(good) >= 2:
            ij = np.array([rng.choice(good, size=2, replace=False) for _ in range(pairs)])
            low = int(_path_counts(G, members, ij).min())
        else:
            low = 0
        report.min_path_count.append(low)
        report.l3_failures += int(low < report.l3_bound)

        cut, _, internal, _ = set_stats(G, K)
        cut_w, _, internal_w, _ = set_stats(Gw, K)
        report.cut_ratios.append(cut_w / cut if cut else float("nan"))
        report.internal_ratios.append(internal_w / internal if internal else float("nan"))
    return report
