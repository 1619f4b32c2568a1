import numpy as np
import pytest

from satdsurvey.corpus import Comment, Corpus
from satdsurvey.learners import DegenerateTrainingError
from satdsurvey.survey import (
    ACTIVE,
    EXHAUSTED,
    STOPPED,
    SessionStateError,
    SurveyConfig,
    SurveySession,
    new_session,
    replay_session,
    simulated_oracle,
)

from conftest import toy_corpus


class TruthStrategy:
    """Test seam: ranking scores equal the true labels (perfect ranker)."""

    def __init__(self, reference: Corpus):
        self.labels = {c.id: float(c.label) for c in reference.comments}

    def retrain(self, X, y, seed):
        pass

    def score(self, X, ids):
        return np.array([self.labels[int(i)] for i in ids])


def small_session(m=20, stop="target@0.9", seed=0, test_n=120, **kw):
    train = toy_corpus("train", 300, 0.2, seed=4)
    test = toy_corpus("test", test_n, 0.15, seed=5)
    config = SurveyConfig(m=m, stop=stop, seed=seed, **kw)
    return SurveySession(test, train, config), test, train


def test_new_session_initial_state():
    sess, test, _ = small_session()
    assert sess.status == ACTIVE
    assert sess.reads == 0 and sess.found == 0
    assert len(sess.pool_ids) == len(test)
    assert len(sess.ranking) == len(test)


def test_new_session_rejects_empty_test():
    train = toy_corpus("train", 100, 0.2, seed=1)
    with pytest.raises(ValueError):
        SurveySession(Corpus("empty", []), train, SurveyConfig())


def test_new_session_rejects_single_class_train():
    test = toy_corpus("test", 50, 0.2, seed=2)
    comments = [
        Comment(id=i, project="t", text=f"plain comment number {i} words", label=False)
        for i in range(40)
    ]
    with pytest.raises(DegenerateTrainingError):
        SurveySession(test, Corpus("train", comments), SurveyConfig())


def test_new_session_rejects_m_zero():
    train = toy_corpus("train", 100, 0.2, seed=1)
    test = toy_corpus("test", 50, 0.2, seed=2)
    with pytest.raises(ValueError):
        SurveySession(test, train, SurveyConfig(m=0))


def test_next_batch_idempotent_until_submitted():
    sess, _, _ = small_session(m=15)
    first = [c.id for c in sess.next_batch()]
    second = [c.id for c in sess.next_batch()]
    assert first == second
    assert len(first) == 15


def test_submit_requires_exact_batch_coverage():
    sess, test, _ = small_session(m=10)
    batch = sess.next_batch()
    answers = {c.id: bool(c.label) for c in batch}
    missing = dict(list(answers.items())[:-1])
    with pytest.raises(ValueError):
        sess.submit_labels(missing)
    extra = dict(answers)
    extra[9999] = True
    with pytest.raises(ValueError):
        sess.submit_labels(extra)
    assert sess.reads == 0  # state unchanged by rejections
    sess.submit_labels(answers)
    assert sess.reads == 10


def test_submit_without_batch_is_an_error():
    sess, _, _ = small_session()
    with pytest.raises(SessionStateError):
        sess.submit_labels({})


def test_no_comment_served_twice():
    sess, test, _ = small_session(m=25, stop="never")
    oracle = simulated_oracle(test)
    seen = []
    while sess.status == ACTIVE:
        batch = sess.next_batch()
        seen.extend(c.id for c in batch)
        sess.submit_labels({c.id: oracle.answer(c.id) for c in batch})
    assert len(seen) == len(set(seen)) == len(test)
    assert sess.status == EXHAUSTED


def test_partial_final_batch_and_exhaustion():
    sess, test, _ = small_session(m=50, stop="never", test_n=120)
    oracle = simulated_oracle(test)
    reports = sess.run(oracle)
    assert [len(r.batch_ids) for r in reports] == [50, 50, 20]
    assert sess.status == EXHAUSTED
    assert sess.found == test.positives()


def test_curve_matches_reads_and_found():
    sess, test, _ = small_session(m=30)
    oracle = simulated_oracle(test)
    batch = sess.next_batch()
    report = sess.submit_labels({c.id: oracle.answer(c.id) for c in batch})
    assert len(sess.curve) == sess.reads == 30
    assert sess.curve.found[-1] == sess.found == report.found


def test_stopped_session_refuses_batches():
    sess, test, _ = small_session(m=20, stop="ros:5")
    # all-negative answers trip the consecutive-miss rule immediately
    batch = sess.next_batch()
    report = sess.submit_labels({c.id: False for c in batch})
    assert report.decision.stop and sess.status == STOPPED
    with pytest.raises(SessionStateError):
        sess.next_batch()


def test_same_seed_reproduces_identical_curve():
    def run(seed):
        sess, test, _ = small_session(m=20, seed=seed)
        oracle = simulated_oracle(test)
        sess.run(oracle)
        return list(sess.curve.reads), list(sess.curve.found), sess.status

    assert run(3) == run(3)


def test_simulated_oracle_contract():
    test = toy_corpus("test", 40, 0.2, seed=9)
    oracle = simulated_oracle(test)
    pos = next(c for c in test.comments if c.label)
    neg = next(c for c in test.comments if not c.label)
    assert oracle.answer(pos.id) is True
    assert oracle.answer(neg.id) is False
    with pytest.raises(LookupError):
        oracle.answer(123456)
    unlabeled = Corpus("u", [Comment(id=0, project="u", text="some words here", label=None)])
    with pytest.raises(ValueError):
        simulated_oracle(unlabeled)


def test_perfect_ranker_cost_bound():
    # with scores equal to true labels, the target rule must stop within
    # prevalence*target + two batches of reading
    train = toy_corpus("train", 200, 0.2, seed=6)
    test = toy_corpus("test", 400, 0.1, seed=7)
    m = 40
    config = SurveyConfig(m=m, stop="target@0.9", seed=1, classifier=TruthStrategy(test))
    sess = SurveySession(test, train, config)
    oracle = simulated_oracle(test)
    sess.run(oracle)
    n, prevalence = len(test), test.prevalence()
    assert sess.status in (STOPPED, EXHAUSTED)
    assert sess.reads / n <= prevalence * 0.9 + 2 * m / n
    assert sess.found >= 0.8 * test.positives() * 0.9


def test_log_replay_reproduces_session(tmp_path):
    log = tmp_path / "run.log"
    train = toy_corpus("train", 300, 0.2, seed=4)
    test = toy_corpus("test", 120, 0.15, seed=5)
    sess = SurveySession(test, train, SurveyConfig(m=20, seed=2, log_path=log))
    oracle = simulated_oracle(test)
    sess.run(oracle, max_batches=3)
    replayed = replay_session(log, test, train)
    assert replayed.labeled == sess.labeled
    assert list(replayed.curve.reads) == list(sess.curve.reads)
    assert list(replayed.curve.found) == list(sess.curve.found)
    assert replayed.estimate.total_positives == sess.estimate.total_positives
    assert replayed.status == sess.status


def test_log_is_deterministic_for_same_labels(tmp_path):
    train = toy_corpus("train", 300, 0.2, seed=4)
    test = toy_corpus("test", 120, 0.15, seed=5)

    def run(path):
        sess = SurveySession(test, train, SurveyConfig(m=20, seed=2, log_path=path))
        oracle = simulated_oracle(test)
        sess.run(oracle, max_batches=2)
        return path.read_bytes()

    assert run(tmp_path / "a.log") == run(tmp_path / "b.log")


def test_new_session_function_wrapper():
    train = toy_corpus("train", 200, 0.2, seed=1)
    test = toy_corpus("test", 80, 0.15, seed=2)
    sess = new_session(test, train)
    assert isinstance(sess, SurveySession)
    assert sess.config.m == 100
