"""Fixed-point estimate of how many debt comments the corpus holds.

The estimator treats every unlabeled comment as negative (debt is rare),
fits a logistic curve from ranking scores to those labels, converts the
curve's probabilities on the unlabeled pool into a handful of pseudo
positives, and repeats until the positive count stops changing.

The probability-to-count conversion walks the pool in descending
probability order accumulating a running sum; each time the sum strictly
exceeds 1 the first comment of the current run is counted as one positive,
the rest of the run as zero, and the sum resets to zero. A trailing run
whose sum never exceeds 1 contributes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .learners import fit_logistic


@dataclass
class EstimateInput:
    """Scores and human labels over the whole corpus.

    ``x`` holds one score per comment: the current pool score for unlabeled
    comments, the score frozen at labeling time for labeled ones.
    ``labels`` is 1 only for human-confirmed positives; unlabeled comments
    carry 0. ``labeled_mask`` marks which comments a human has judged.
    """

    x: np.ndarray
    labels: np.ndarray
    labeled_mask: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.labeled_mask = np.asarray(self.labeled_mask, dtype=bool)
        if not (self.x.shape == self.labels.shape == self.labeled_mask.shape):
            raise ValueError("x, labels and labeled_mask must have equal length")
        if np.any(self.labels[~self.labeled_mask] != 0):
            raise ValueError("unlabeled comments must carry label 0")


@dataclass
class Estimate:
    total_positives: int
    iterations: int
    converged: bool
    history: list[int] = field(default_factory=list)
    degenerate: bool = False
    # final merged labels (human + pseudo), kept for fixed-point checks
    final_labels: np.ndarray | None = field(default=None, repr=False)


def redistribute(p_sorted) -> np.ndarray:
    """Binarize descending probabilities by greedy run partitioning."""
    p = np.asarray(p_sorted, dtype=np.float64)
    if np.any(np.diff(p) > 0):
        raise ValueError("redistribute input must be sorted in descending order")
    out = np.zeros(p.shape[0], dtype=np.int64)
    run_start = 0
    acc = 0.0
    for j in range(p.shape[0]):
        acc += p[j]
        if acc > 1.0:
            out[run_start] = 1
            run_start = j + 1
            acc = 0.0
    return out


def estimate_total(inp: EstimateInput, seed: int = 0, max_iter: int = 100) -> Estimate:
    """Run the fixed-point loop and return the final positive count.

    Ties among equal probabilities are broken by a seed-shuffled order, so
    a run seed fully determines the outcome. With zero confirmed positives
    the curve would be degenerate; the estimate is then 0 and flagged.
    """
    human_pos = int(inp.labels[inp.labeled_mask].sum())
    if human_pos == 0:
        return Estimate(
            total_positives=0,
            iterations=0,
            converged=True,
            history=[0],
            degenerate=True,
            final_labels=inp.labels.copy(),
        )

    unlabeled = np.flatnonzero(~inp.labeled_mask)
    # seed-shuffled tie order for the descending sort
    perm = np.random.RandomState(seed % 2**32).permutation(unlabeled.shape[0])
    shuffled = unlabeled[perm]

    y = inp.labels.copy()
    history = [int(y.sum())]
    converged = False
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        c_i = int(y.sum())
        curve = fit_logistic(inp.x, y)
        if unlabeled.size:
            p = curve.predict(inp.x[shuffled])
            order = np.argsort(-p, kind="stable")
            assigned = redistribute(p[order])
            y_next = inp.labels.copy()
            y_next[shuffled[order]] = assigned
        else:
            y_next = inp.labels.copy()
        c_next = int(y_next.sum())
        history.append(c_next)
        y = y_next
        if c_next == c_i:
            converged = True
            break
    return Estimate(
        total_positives=history[-1],
        iterations=iterations,
        converged=converged,
        history=history,
        final_labels=y,
    )
