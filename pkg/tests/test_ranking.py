import numpy as np
import pytest
from hypothesis import given, strategies as st

from satdsurvey.learners import train_ensemble, train_linear_svm
from satdsurvey.ranking import normalize, rank_by_raw, rank_by_svm, rank_by_votes

import scipy.sparse as sp


def test_normalize_examples():
    assert normalize([-2, 0, 2]).tolist() == [0.0, 0.5, 1.0]
    assert normalize([7, 7]).tolist() == [0.5, 0.5]
    assert normalize([0, 1, 3]).tolist() == pytest.approx([0.0, 1 / 3, 1.0])


def test_rank_by_raw_orders_descending():
    r = rank_by_raw([10, 11, 12], [2.0, 0.0, -2.0])
    assert r.ids.tolist() == [10, 11, 12]
    assert r.scores.tolist() == [1.0, 0.5, 0.0]


def test_rank_all_equal_keeps_input_order():
    r = rank_by_raw([5, 6, 7], [1.0, 1.0, 1.0])
    assert r.ids.tolist() == [5, 6, 7]
    assert r.scores.tolist() == [0.5, 0.5, 0.5]


def test_rank_stable_on_ties():
    r = rank_by_raw([1, 2, 3, 4], [0.5, 0.9, 0.5, 0.1])
    assert r.ids.tolist() == [2, 1, 3, 4]


def test_rank_invariant_under_monotone_transform():
    rng = np.random.RandomState(0)
    raw = rng.randn(50)
    ids = np.arange(50)
    a = rank_by_raw(ids, raw)
    b = rank_by_raw(ids, np.exp(2.5 * raw))  # strictly monotone transform
    assert a.ids.tolist() == b.ids.tolist()


def test_rank_by_svm_separable_puts_positives_first():
    rng = np.random.RandomState(2)
    X = np.vstack([rng.randn(10, 2) * 0.3 + 2, rng.randn(10, 2) * 0.3 - 2])
    y = np.array([1] * 10 + [0] * 10)
    model = train_linear_svm(sp.csr_matrix(X), y)
    ranking = rank_by_svm(model, sp.csr_matrix(X), np.arange(20))
    assert set(ranking.ids[:10].tolist()) == set(range(10))


def test_rank_by_votes_scores_are_minmax_of_votes():
    rng = np.random.RandomState(3)
    X = rng.rand(60, 5)
    y = (X[:, 0] > 0.5).astype(int)
    ens = train_ensemble(sp.csr_matrix(X), y, k=9, seed=1)
    ranking = rank_by_votes(ens, sp.csr_matrix(X), np.arange(60))
    assert ranking.scores.max() == 1.0
    assert ranking.scores.min() == 0.0
    assert np.all(np.diff(ranking.scores) <= 0)


def test_rank_mismatched_lengths():
    with pytest.raises(ValueError):
        rank_by_raw([1, 2], [0.1])


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=40))
def test_normalize_properties(raw):
    scores = normalize(raw)
    assert np.all(scores >= 0.0) and np.all(scores <= 1.0)
    order = np.argsort(raw, kind="stable")
    assert np.all(np.diff(scores[order]) >= -1e-12)  # order preserved
