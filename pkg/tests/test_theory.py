import itertools
import math
import warnings

import numpy as np
import pytest

from labeldiffusion.models import ModelSpec
from labeldiffusion.theory import (ModelParams, a0_threshold_simplified, bounds_formal,
                                   bounds_simplified, clamp01, concentration_factors,
                                   conjecture_margins, f1_lower_simplified, fd_f1_upper,
                                   labels_f1_closed_form, monte_carlo_verify)


def test_perfect_labels_give_unit_bound():
    for g in (0.01, 0.3, 1.0, 7.5):
        assert f1_lower_simplified(1.0, 1.0, g) == 1.0


def test_half_accuracy_example():
    assert f1_lower_simplified(0.5, 0.5, 1.0) == pytest.approx(1 / 1.75)


def test_threshold_example():
    # a1 = 1 collapses the threshold to 1 - (sqrt(1 + p/g) - 1) g
    assert a0_threshold_simplified(1.5, 0.5, 1.0) == pytest.approx(0.5)


def test_degenerate_inputs_raise():
    with pytest.raises(ZeroDivisionError):
        f1_lower_simplified(0.9, 0.9, 0.0)
    with pytest.raises(ZeroDivisionError):
        f1_lower_simplified(0.9, 0.0, 1.0)
    with pytest.raises(ZeroDivisionError):
        a0_threshold_simplified(0.1, 0.0, 0.9)
    with pytest.raises(ZeroDivisionError):
        concentration_factors(0.1, 100, 1.0, 0.5, 0.5)


def test_simplified_bound_is_monotone():
    grid = np.linspace(0.5, 1.0, 11)
    gammas = np.geomspace(0.05, 20, 15)
    for a1, g in itertools.product(grid, gammas):
        vals = [f1_lower_simplified(a0, a1, g) for a0 in grid]
        assert np.all(np.diff(vals) >= -1e-15)
    for a0, g in itertools.product(grid, gammas):
        vals = [f1_lower_simplified(a0, a1, g) for a1 in grid]
        assert np.all(np.diff(vals) >= -1e-15)
    for a0, a1 in itertools.product(grid, grid):
        vals = [f1_lower_simplified(a0, a1, g) for g in gammas]
        assert np.all(np.diff(vals) >= -1e-15)


def test_threshold_decreasing_in_gamma_at_full_inside_accuracy():
    gammas = np.geomspace(0.01, 50, 40)
    for p in (0.01, 0.05, 0.2, 0.8):
        vals = [a0_threshold_simplified(p, g, 1.0) for g in gammas]
        assert np.all(np.diff(vals) < 0)


def test_r_value():
    k = 101
    r, rp = concentration_factors(1.0, k, 0.5, 0.5, 0.5)
    assert r == pytest.approx(9.12)
    assert rp == pytest.approx(18.24)


def test_perfect_labels_mass_and_false_positives():
    params = ModelParams(10000, 500, 0.2, 0.05, 1.0, 1.0)
    with pytest.warns(UserWarning):
        fb = bounds_formal(params)
    assert fb.theta_dagger == pytest.approx(fb.r * 500)
    assert fb.fp_upper == pytest.approx((fb.r - 1) * 500)


def test_formal_flags_failed_hypotheses():
    params = ModelParams(10000, 500, 0.05, 0.025, 0.9, 0.9)
    assert not params.hypotheses_hold()
    with pytest.warns(UserWarning):
        fb = bounds_formal(params)
    assert not fb.hypotheses_hold
    ok = ModelParams(10**6, 10**5, 0.2, 0.01, 0.9, 0.9)
    assert ok.hypotheses_hold()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert bounds_formal(ok).hypotheses_hold


def test_formal_threshold_approaches_simplified():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for a0, a1 in [(0.7, 0.7), (0.9, 0.9), (0.6, 1.0)]:
            params = ModelParams(10**7, 10**6, 0.5, 0.01, a0, a1, 1e-6, 1e-6, 1e-6)
            fb = bounds_formal(params)
            _, thr = bounds_simplified(params)
            assert abs(fb.a0_threshold - thr) < 1e-3
            assert fb.r == pytest.approx(1.0, abs=1e-4)


def test_fd_ceiling_below_one_and_labels_vanish():
    params = ModelParams(10000, 500, 0.05, 0.025, 0.9, 0.9)
    assert 0 < fd_f1_upper(params) < 1
    small = [labels_f1_closed_form(500 * m, 500, 0.9, 0.9) for m in (10, 100, 1000, 10000, 100000)]
    assert np.all(np.diff(small) < 0)
    assert small[-1] < 1e-3
    assert labels_f1_closed_form(1000, 50, 1.0, 1.0) == 1.0


def test_clamp():
    assert clamp01(1.7) == 1.0 and clamp01(-0.2) == 0.0 and clamp01(0.3) == 0.3


def test_conjecture_examples():
    m = conjecture_margins(10000, 500, 0.05, 0.0015, 0.7, 0.6)
    assert m.c1_lhs == pytest.approx(10.0) and m.c1_rhs == pytest.approx(9.975)
    assert m.c1_holds
    m = conjecture_margins(10000, 500, 0.05, 0.0075, 0.8, 0.7)
    assert m.c2_lhs == pytest.approx(0.375) and m.c2_rhs == pytest.approx(0.4275)
    assert m.c2_holds
    for a0, q in [(0.5, 1e-4), (1.0, 0.3)]:
        m = conjecture_margins(10000, 500, 0.05, q, a0, 1.0)
        assert m.c1_lhs == 0 and not m.c1_holds


def test_monte_carlo_clique_case():
    spec = ModelSpec(200, 20, 1.0, 0.0, ("erdos_renyi", 0.05))
    rep = monte_carlo_verify(spec, 1.0, 1.0, 5, np.random.default_rng(0), pairs=20)
    s = rep.summary()
    assert s["l1_failure_rate"] == 0.0
    assert s["l2_failure_rate"] == 0.0
    assert s["l3_failure_rate"] == 0.0
    # every correctly labelled target node has exactly k - 1 neighbors
    assert rep.max_weighted_degree == [19.0] * 5


def test_monte_carlo_ratios_and_report_fields():
    spec = ModelSpec(2000, 200, 0.3, 0.02)
    rep = monte_carlo_verify(spec, 0.8, 0.8, 10, np.random.default_rng(1), pairs=30)
    s = rep.summary()
    assert s["trials"] == 10
    assert s["mean_cut_ratio"] == pytest.approx(0.32, rel=0.1)
    assert s["mean_internal_ratio"] == pytest.approx(0.68, rel=0.1)
    assert s["l1_prob_bound"] == pytest.approx(200 ** (-1 / 3))
    assert s["delta1"] == 0.5 and s["eps3"] == 1.0
    with pytest.raises(ValueError):
        monte_carlo_verify(ModelSpec(30000, 10, 0.5, 0.1), 0.9, 0.9, 1, np.random.default_rng(0))


def test_simplified_pair_helper():
    params = ModelParams(10000, 500, 0.05, 0.0015, 0.9, 0.9)
    f1, thr = bounds_simplified(params)
    assert f1 == f1_lower_simplified(0.9, 0.9, params.gamma)
    assert thr == a0_threshold_simplified(0.05, params.gamma, 0.9)
    assert not math.isnan(thr)
