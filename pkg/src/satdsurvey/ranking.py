"""Turn classifier outputs into a reading order plus [0,1] scores.

Scores are min-max normalized over the current unlabeled pool, so the
remaining-count estimator always sees inputs on a stable scale while the
pool shrinks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .learners import LinearModel, TreeEnsemble, decision_function, ensemble_votes


@dataclass
class Ranking:
    """Unlabeled ids in descending interest order with aligned scores."""

    ids: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.ids)

    def top(self, k: int) -> np.ndarray:
        return self.ids[:k]

    def score_of(self) -> dict[int, float]:
        return {int(i): float(s) for i, s in zip(self.ids, self.scores)}


def normalize(raw) -> np.ndarray:
    """Min-max scale to [0,1]; a spread of zero maps everything to 0.5."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        return raw.copy()
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.full_like(raw, 0.5)
    return (raw - lo) / (hi - lo)


def rank_by_raw(ids, raw) -> Ranking:
    """Stable descending sort of ``ids`` by raw score, then normalized."""
    ids = np.asarray(ids, dtype=np.int64)
    raw = np.asarray(raw, dtype=np.float64)
    if ids.shape != raw.shape:
        raise ValueError("ids and scores must align")
    order = np.argsort(-raw, kind="stable")
    return Ranking(ids=ids[order], scores=normalize(raw[order]))


def rank_by_svm(model: LinearModel, pool: sp.csr_matrix, ids) -> Ranking:
    return rank_by_raw(ids, decision_function(model, pool))


def rank_by_votes(ens: TreeEnsemble, pool: sp.csr_matrix, ids) -> Ranking:
    return rank_by_raw(ids, ensemble_votes(ens, pool).astype(np.float64))
