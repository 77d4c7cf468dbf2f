"""
When do noisy labels help?
==========================

Closed-form recovery guarantees as a function of label accuracy, and a
quick empirical look at the degree and connectivity facts they rest on.
"""
import warnings

import numpy as np

from labeldiffusion import ModelSpec
from labeldiffusion.theory import (ModelParams, bounds_formal, bounds_simplified,
                                   conjecture_margins, fd_f1_upper, labels_f1_closed_form,
                                   monte_carlo_verify)

n, k, p = 10000, 500, 0.05
print(" q       a0   a1   F1 lower  a0 needed  FD ceiling  labels F1")
for q in (0.0015, 0.0075, 0.025):
    for a0, a1 in ((0.7, 0.7), (0.9, 0.9), (0.99, 0.6)):
        params = ModelParams(n, k, p, q, a0, a1)
        f1, thr = bounds_simplified(params)
        print(f"{q:<7} {a0:<4} {a1:<4} {f1:9.3f} {thr:10.3f} {fd_f1_upper(params):11.3f}"
              f" {labels_f1_closed_form(n, k, a0, a1):10.3f}")

# The non-asymptotic version also says how much mass to use.
with warnings.catch_warnings(record=True) as caught:
    fb = bounds_formal(ModelParams(n, k, p, 0.0075, 0.9, 0.9))
print("\nformal bound: theta = %.0f, F1 >= %.3f, r = %.2f" % (fb.theta_dagger, fb.f1_lower, fb.r))
if caught:
    print("warning:", caught[0].message)

# Whether cross-label edges should be kept (eps > 0) or cut (eps = 0).
for q, a0, a1 in ((0.0015, 0.7, 0.6), (0.0075, 0.8, 0.7)):
    m = conjecture_margins(n, k, p, q, a0, a1)
    print(f"q={q}: keep cross edges? {m.c1_holds}  cut them? {m.c2_holds}")

# Degree facts on sampled graphs (smaller instance so it runs quickly).
spec = ModelSpec(4000, 400, 0.1, 0.02, ("sbm_blocks", 400, 0.1, 0.02))
rep = monte_carlo_verify(spec, 0.9, 0.9, 10, np.random.default_rng(0), pairs=100)
s = rep.summary()
print("\nfailure rates L1/L2/L3: %.2f %.2f %.2f" % (
    s["l1_failure_rate"], s["l2_failure_rate"], s["l3_failure_rate"]))
print("cut ratio %.3f (expected %.3f), internal ratio %.3f (expected %.3f)" % (
    s["mean_cut_ratio"], s["expected_cut_ratio"],
    s["mean_internal_ratio"], s["expected_internal_ratio"]))
