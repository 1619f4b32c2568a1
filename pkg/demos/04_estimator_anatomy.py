"""
Inside the remaining-count estimator
====================================

The estimator fits a logistic curve from ranking positions to labels
(every unlabeled comment pessimistically counted as clean), converts the
curve's probabilities over the pool into a handful of pseudo-positives by
greedy run partitioning, and iterates to a fixed point.

Here: 8 human-labeled comments (5 debt among the top positions) and 16
unlabeled ones, half of which sit at debt-like positions.
"""

import numpy as np

from satdsurvey.estimator import EstimateInput, estimate_total, redistribute
from satdsurvey.learners import fit_logistic

x = np.concatenate([
    np.linspace(1.0, 0.9, 5),    # labeled debt, top of the ranking
    np.linspace(0.3, 0.1, 3),    # labeled clean, low positions
    np.linspace(0.88, 0.72, 8),  # unlabeled, debt-like positions
    np.linspace(0.45, 0.05, 8),  # unlabeled, unremarkable positions
])
labels = np.array([1] * 5 + [0] * 3 + [0] * 16)
mask = np.array([True] * 8 + [False] * 16)

est = estimate_total(EstimateInput(x=x, labels=labels, labeled_mask=mask), seed=0)
print("positive-count trajectory per iteration:", est.history)
print(f"converged={est.converged} after {est.iterations} iterations; total={est.total_positives}")

# the pieces, spelled out for the final iteration
curve = fit_logistic(x, est.final_labels)
print(f"\nfitted curve: slope {curve.slope:.2f}, intercept {curve.intercept:.2f}")
pool = x[~mask]
p = np.sort(curve.predict(pool))[::-1]
print("pool probabilities (desc):", np.round(p, 3))
print("binarized by run partitioning:", redistribute(p))
