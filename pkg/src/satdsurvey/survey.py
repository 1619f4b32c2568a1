"""The survey loop: serve batches of comments for labeling, retrain on the
feedback, re-rank the remaining pool, re-estimate how many positives are
left, and apply a stopping rule.

A session is created from a test corpus (the project being surveyed) and a
train corpus (all other projects). The prior model is trained on the train
projects and ranks the whole test pool for the first batch; from then on
the model is retrained each batch on train data plus every test label
gathered so far.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .estimator import Estimate, EstimateInput, estimate_total
from .learners import (
    DegenerateTrainingError,
    SvmConfig,
    decision_function,
    ensemble_votes,
    train_ensemble,
    train_linear_svm,
)
from .ranking import Ranking, normalize, rank_by_raw
from .stopping import NeverStop, RetrievalCurve, StoppingDecision, parse_stop_spec
from .textprep import fit_vocabulary, transform

ACTIVE = "active"
STOPPED = "stopped"
EXHAUSTED = "exhausted"

LOG_HEADER = "# satdsurvey session log v1"
LOG_COLUMNS = "iteration\tid\tlabel\tscore\tfound\treads\testimate\tstop"


class SessionStateError(RuntimeError):
    """Operation not valid in the session's current state."""


@dataclass
class SurveyConfig:
    m: int = 100
    classifier: object = "svm"  # "svm" | "ensemble" | a strategy object
    stop: object = "target@0.9"  # rule spec string or rule object
    seed: int = 0
    min_df: int = 1
    ensemble_trees: int = 9
    sample_fraction: float = 0.9
    svm_C: float = 1.0
    svm_tol: float = 1e-4
    log_path: str | Path | None = None


@dataclass
class IterationReport:
    iteration: int
    batch_ids: list[int]
    found: int
    reads: int
    estimate: Estimate
    decision: StoppingDecision
    seconds: float
    status: str


@dataclass
class SessionMatrices:
    """Feature matrices shared by repeated sessions over the same split."""

    vocab: object
    X_train: sp.csr_matrix
    y_train: np.ndarray
    X_test: sp.csr_matrix


def build_matrices(test: Corpus, train: Corpus, min_df: int = 1) -> SessionMatrices:
    vocab = fit_vocabulary(train.texts(), min_df=min_df)
    return SessionMatrices(
        vocab=vocab,
        X_train=transform(train.texts(), vocab),
        y_train=np.array([bool(c.label) for c in train.comments]),
        X_test=transform(test.texts(), vocab),
    )


class SimulatedOracle:
    """Answers label queries from a fully labeled reference corpus."""

    mode = "simulated"

    def __init__(self, reference: Corpus):
        if not reference.fully_labeled():
            raise ValueError("simulated oracle needs a fully labeled reference corpus")
        self._labels = {c.id: bool(c.label) for c in reference.comments}

    def answer(self, comment_id: int) -> bool:
        try:
            return self._labels[comment_id]
        except KeyError:
            raise LookupError(f"comment id {comment_id} not in reference set") from None


def simulated_oracle(reference: Corpus) -> SimulatedOracle:
    return SimulatedOracle(reference)


class SvmStrategy:
    """Linear SVM ranker; warm-starts across survey iterations."""

    def __init__(self, C: float = 1.0, tol: float = 1e-4):
        self.C = C
        self.tol = tol
        self.model = None

    def retrain(self, X, y, seed: int) -> None:
        cfg = SvmConfig(C=self.C, tol=self.tol, seed=seed)
        self.model = train_linear_svm(X, y, cfg, warm=self.model)

    def score(self, X, ids) -> np.ndarray:
        return decision_function(self.model, X)


class EnsembleStrategy:
    """Bagged decision trees ranker; interest is the positive vote count."""

    def __init__(self, k: int = 9, sample_fraction: float = 0.9):
        self.k = k
        self.sample_fraction = sample_fraction
        self.model = None

    def retrain(self, X, y, seed: int) -> None:
        self.model = train_ensemble(X, y, k=self.k, sample_fraction=self.sample_fraction, seed=seed)

    def score(self, X, ids) -> np.ndarray:
        return ensemble_votes(self.model, X).astype(np.float64)


def _make_strategy(config: SurveyConfig):
    c = config.classifier
    if isinstance(c, str):
        if c == "svm":
            return SvmStrategy(C=config.svm_C, tol=config.svm_tol)
        if c == "ensemble":
            return EnsembleStrategy(k=config.ensemble_trees, sample_fraction=config.sample_fraction)
        raise ValueError(f"unknown classifier {c!r}")
    return c


def _make_rule(stop):
    return parse_stop_spec(stop) if isinstance(stop, str) else stop


class SurveySession:
    """Mutable state of one surveying run over a single test project."""

    def __init__(
        self,
        test: Corpus,
        train: Corpus,
        config: SurveyConfig,
        matrices: SessionMatrices | None = None,
    ):
        if config.m < 1:
            raise ValueError("batch size m must be >= 1")
        if len(test) == 0:
            raise ValueError("test corpus is empty")
        self.test = test
        self.train = train
        self.config = config
        self.rule = _make_rule(config.stop)
        self.strategy = _make_strategy(config)
        if [c.id for c in test.comments] != list(range(len(test))):
            raise ValueError("test corpus ids must be 0..n-1 in row order")
        self._by_id = {c.id: c for c in test.comments}

        matrices = matrices or build_matrices(test, train, min_df=config.min_df)
        self.vocab = matrices.vocab
        self._X_train = matrices.X_train
        self._y_train = matrices.y_train
        if self._y_train.min() == self._y_train.max():
            raise DegenerateTrainingError("train corpus has a single class")
        self._X_test = matrices.X_test

        self.labeled: dict[int, bool] = {}
        self.frozen_score: dict[int, float] = {}
        self.labels_in_order: list[int] = []
        self.curve = RetrievalCurve()
        self.estimate: Estimate | None = None
        self.last_decision: StoppingDecision | None = None
        self.status = ACTIVE
        self.iteration = 0
        self.iteration_seconds: list[float] = []
        self._reserved: list[int] | None = None
        self._labeled_row_order: list[int] = []

        self._log_path = Path(config.log_path) if config.log_path else None
        self._log_started = False

        self.strategy.retrain(self._X_train, self._y_train, config.seed)
        self.ranking = self._rank_pool()

    # -- state ---------------------------------------------------------------

    @property
    def pool_ids(self) -> list[int]:
        return [c.id for c in self.test.comments if c.id not in self.labeled]

    @property
    def reads(self) -> int:
        return len(self.labels_in_order)

    @property
    def found(self) -> int:
        return int(sum(self.labels_in_order))

    def _rank_pool(self) -> Ranking:
        ids = np.array(self.pool_ids, dtype=np.int64)
        if ids.size == 0:
            self._position_of = {}
            return Ranking(ids=ids, scores=np.zeros(0))
        scores = self.strategy.score(self._X_test[ids], ids)
        ranking = rank_by_raw(ids, scores)
        # estimator input: each comment's rank position among the pool it
        # was sorted with, scaled to [0,1] (best = 1); stays on one stable
        # scale however the raw score distribution drifts between retrains
        n = len(ranking)
        if n > 1:
            pos = (n - 1 - np.arange(n, dtype=np.float64)) / (n - 1)
        else:
            pos = np.full(n, 0.5)
        self._position_of = {int(i): float(p) for i, p in zip(ranking.ids, pos)}
        return ranking

    # -- the loop ------------------------------------------------------------

    def next_batch(self) -> list:
        """Top ``min(m, pool)`` comments in rank order; idempotent until
        the batch is labeled."""
        if self.status != ACTIVE:
            raise SessionStateError(f"session is {self.status}")
        if self._reserved is None:
            self._reserved = [int(i) for i in self.ranking.top(self.config.m)]
        return [self._by_id[i] for i in self._reserved]

    def submit_labels(self, answers) -> IterationReport:
        """Record one batch of labels and run the update step."""
        if self.status != ACTIVE:
            raise SessionStateError(f"session is {self.status}")
        if self._reserved is None:
            raise SessionStateError("no batch has been served")
        answers = {int(k): bool(v) for k, v in answers.items()}
        if set(answers) != set(self._reserved):
            raise ValueError("labels must cover exactly the reserved batch")

        t0 = time.perf_counter()
        batch_ids = list(self._reserved)
        for cid in batch_ids:
            label = answers[cid]
            self.labeled[cid] = label
            self.frozen_score[cid] = self._position_of[cid]
            self.labels_in_order.append(int(label))
            self.curve.append(label)
            self._labeled_row_order.append(cid)

        # estimate and decide on the serving ranking's scale, where the new
        # labels and the remaining pool are directly comparable; only then
        # retrain and re-rank for the next batch
        self.estimate = self._estimate()
        decision = self.rule.evaluate(
            self.found, self.curve, self.labels_in_order, self.estimate
        )
        self.last_decision = decision
        self._retrain()
        self.ranking = self._rank_pool()
        elapsed = time.perf_counter() - t0
        self.iteration_seconds.append(elapsed)
        self.iteration += 1

        if not self.pool_ids:
            self.status = EXHAUSTED
        elif decision.stop:
            self.status = STOPPED
        self._reserved = None
        self._log_batch(batch_ids)
        return IterationReport(
            iteration=self.iteration,
            batch_ids=batch_ids,
            found=self.found,
            reads=self.reads,
            estimate=self.estimate,
            decision=decision,
            seconds=elapsed,
            status=self.status,
        )

    def _retrain(self) -> None:
        rows = self._X_test[np.array(self._labeled_row_order, dtype=np.int64)]
        X = sp.vstack([self._X_train, rows], format="csr")
        y = np.concatenate(
            [self._y_train, np.array([self.labeled[i] for i in self._labeled_row_order], dtype=bool)]
        )
        try:
            self.strategy.retrain(X, y, self.config.seed)
        except DegenerateTrainingError:
            pass  # keep the prior model (cannot happen when train has both classes)

    def _estimate(self) -> Estimate:
        # x mixes the still-unlabeled pool's rank positions under the
        # ranking that served the latest batch with each labeled comment's
        # position frozen at its own serving time; the newest labels anchor
        # the curve on exactly the scale the pool is expressed in
        n = len(self.test)
        x = np.zeros(n)
        labels = np.zeros(n, dtype=np.int64)
        mask = np.zeros(n, dtype=bool)
        for cid, pos in self._position_of.items():
            x[cid] = pos
        for cid, label in self.labeled.items():
            x[cid] = self.frozen_score[cid]
            labels[cid] = int(label)
            mask[cid] = True
        return estimate_total(EstimateInput(x=x, labels=labels, labeled_mask=mask), seed=self.config.seed)

    def run(self, oracle, max_batches: int | None = None) -> list[IterationReport]:
        """Drive the loop with an oracle until the rule fires or the pool
        empties."""
        reports = []
        while self.status == ACTIVE and (max_batches is None or len(reports) < max_batches):
            batch = self.next_batch()
            answers = {c.id: oracle.answer(c.id) for c in batch}
            reports.append(self.submit_labels(answers))
        return reports

    def stop_now(self) -> None:
        """Manual stop (the reviewer decided to halt)."""
        if self.status == ACTIVE:
            self.status = STOPPED
            if self._log_path is not None:
                with open(self._log_path, "a", encoding="utf-8") as f:
                    f.write("# manual-stop\n")

    def resume(self, stop) -> None:
        """Explicit reviewer override: push past a fired stopping rule.

        Replaces the rule (typically with a stricter target) and reopens
        the session. Only meaningful on a stopped session with pool left.
        """
        if self.status != STOPPED:
            raise SessionStateError(f"can only resume a stopped session, not {self.status}")
        if not self.pool_ids:
            raise SessionStateError("nothing left to read")
        self.rule = _make_rule(stop)
        self.status = ACTIVE
        if self._log_path is not None:
            with open(self._log_path, "a", encoding="utf-8") as f:
                f.write(f"# resume\t{self.rule}\n")

    # -- session log ---------------------------------------------------------

    def _config_json(self) -> str:
        return json.dumps(
            {
                "test": self.test.name,
                "train": self.train.name,
                "m": self.config.m,
                "classifier": self.config.classifier
                if isinstance(self.config.classifier, str)
                else "custom",
                "stop": str(self.rule),
                "seed": self.config.seed,
                "min_df": self.config.min_df,
            },
            sort_keys=True,
        )

    def _log_batch(self, batch_ids: list[int]) -> None:
        if self._log_path is None:
            return
        lines = []
        if not self._log_started:
            lines.append(LOG_HEADER)
            lines.append(f"# config\t{self._config_json()}")
            lines.append(LOG_COLUMNS)
            self._log_started = True
        start_read = self.reads - len(batch_ids)
        found_running = self.found - sum(int(self.labeled[i]) for i in batch_ids)
        est = self.estimate.total_positives if self.estimate else 0
        stop = int(self.last_decision.stop) if self.last_decision else 0
        for offset, cid in enumerate(batch_ids):
            label = int(self.labeled[cid])
            found_running += label
            lines.append(
                f"{self.iteration}\t{cid}\t{label}\t{self.frozen_score[cid]!r}\t"
                f"{found_running}\t{start_read + offset + 1}\t{est}\t{stop}"
            )
        with open(self._log_path, "a", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")


def new_session(test: Corpus, train: Corpus, config: SurveyConfig | None = None) -> SurveySession:
    return SurveySession(test, train, config or SurveyConfig())


def replay_session(
    log_path: str | Path, test: Corpus, train: Corpus, config: SurveyConfig | None = None
) -> SurveySession:
    """Rebuild a session by replaying its log against the same corpora.

    The recorded batch ids are checked against what the rebuilt session
    serves, so a corpus or config mismatch fails loudly rather than
    silently diverging.
    """
    log_path = Path(log_path)
    recorded: list[tuple[int, int, int]] = []
    manual_stop = False
    resumes: list[tuple[int, str]] = []  # (after how many labels, rule spec)
    logged_config = None
    with open(log_path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("# config\t"):
                logged_config = json.loads(line.split("\t", 1)[1])
            elif line == "# manual-stop":
                manual_stop = True
            elif line.startswith("# resume\t"):
                resumes.append((len(recorded), line.split("\t", 1)[1]))
            elif line.startswith("#") or line == LOG_COLUMNS or not line:
                continue
            else:
                it, cid, label = line.split("\t")[:3]
                recorded.append((int(it), int(cid), int(label)))

    if config is None:
        if logged_config is None:
            raise ValueError(f"log {log_path} has no config line")
        config = SurveyConfig(
            m=logged_config["m"],
            classifier=logged_config["classifier"],
            stop=logged_config["stop"],
            seed=logged_config["seed"],
            min_df=logged_config["min_df"],
        )

    session = SurveySession(test, train, config)
    by_iteration: dict[int, list[tuple[int, int]]] = {}
    for it, cid, label in recorded:
        by_iteration.setdefault(it, []).append((cid, label))
    labels_done = 0
    for it in sorted(by_iteration):
        batch = session.next_batch()
        served = [c.id for c in batch]
        logged = [cid for cid, _ in by_iteration[it]]
        if served != logged:
            raise ValueError(f"replay mismatch at iteration {it}: log does not fit this corpus/config")
        session.submit_labels({cid: bool(label) for cid, label in by_iteration[it]})
        labels_done += len(logged)
        for at, spec in resumes:
            if at == labels_done and session.status == STOPPED:
                session.resume(spec)
    if manual_stop:
        session.stop_now()
    session._log_path = log_path  # future batches keep appending to the same log
    session._log_started = True
    return session
