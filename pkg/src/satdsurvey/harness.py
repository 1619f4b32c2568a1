"""Experiment harness: leave-one-project-out survey rigs, recall/cost
metrics, cross-project classify-only evaluation, and report emission.

A rig cell is one (test project, repeat) pair. Every cell runs a full
simulated-oracle survey with its own seed. Stopping rules are evaluated as
pure observers of the shared reading path, so one pass per cell yields the
stop point of every rule under study at identical rankings.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .corpus import Corpus, discover_corpora, leave_one_out
from .learners import train_ensemble, ensemble_classify
from .stopping import NeverStop, parse_stop_spec
from .survey import (
    ACTIVE,
    SessionMatrices,
    SurveyConfig,
    SurveySession,
    build_matrices,
    simulated_oracle,
)


class UndefinedMetricError(ValueError):
    """Recall is undefined when the corpus holds no true positives."""


def recall(found_positives: int, total_positives: int) -> float:
    if total_positives <= 0:
        raise UndefinedMetricError("recall undefined: no true positives")
    return 100.0 * found_positives / total_positives


def cost(reads: int, corpus_size: int) -> float:
    if corpus_size <= 0:
        raise ValueError("corpus_size must be positive")
    return 100.0 * reads / corpus_size


def overhead_percent(iteration_seconds: float, m: int, seconds_per_comment: float = 10.3) -> float:
    """Share of wall time a reviewer spends waiting on the engine."""
    t = float(iteration_seconds)
    if t <= 0:
        return 0.0
    return 100.0 * t / (m * seconds_per_comment + t)


def median(values) -> float:
    return float(np.median(np.asarray(list(values), dtype=np.float64)))


def iqr(values) -> float:
    """75th minus 25th percentile, linear interpolation."""
    v = np.asarray(list(values), dtype=np.float64)
    return float(np.percentile(v, 75) - np.percentile(v, 25))


def seed_for(master_seed: int, project_index: int, repeat: int) -> int:
    """Auditable per-cell seed scheme; recorded in every run record."""
    return master_seed * 1_000_003 + project_index * 1_009 + repeat


# ---------------------------------------------------------------------------


@dataclass
class RigConfig:
    classifier: str = "svm"
    rules: tuple[str, ...] = ("target@0.9",)
    repeats: int = 10
    m: int = 100
    master_seed: int = 1
    min_df: int = 1
    jobs: int = 1
    # observer cap: give up waiting for unfired rules past this corpus share
    cap_fraction: float = 1.0


@dataclass
class RunRecord:
    project: str
    repeat: int
    seed: int
    rule: str
    recall: float
    cost: float
    reads: int
    found: int
    total_positives: int
    corpus_size: int
    batches: int
    mean_batch_seconds: float
    estimator_iterations: int
    capped: bool = False


@dataclass
class RigResult:
    records: list[RunRecord]
    config: dict
    curves: dict = field(default_factory=dict)  # (project, repeat) -> (reads, found) lists

    def rules(self) -> list[str]:
        return sorted({r.rule for r in self.records})

    def projects(self) -> list[str]:
        return sorted({r.project for r in self.records})

    def select(self, rule: str, project: str | None = None) -> list[RunRecord]:
        return [
            r
            for r in self.records
            if r.rule == rule and (project is None or r.project == project)
        ]

    def per_project(self, rule: str, metric: str) -> dict[str, float]:
        """Median of ``metric`` over repeats, per project."""
        return {
            p: median(getattr(r, metric) for r in self.select(rule, p))
            for p in self.projects()
        }

    def overall(self, rule: str, metric: str) -> tuple[float, float]:
        """(median, IQR) of the per-project medians."""
        vals = list(self.per_project(rule, metric).values())
        return median(vals), iqr(vals)


# ---------------------------------------------------------------------------
# rig cells


def run_survey_cell(
    corpora: list[Corpus],
    test_name: str,
    seed: int,
    repeat: int,
    config: RigConfig,
    matrices: SessionMatrices | None = None,
) -> tuple[list[RunRecord], tuple[list[int], list[int]]]:
    """One full simulated run; every rule in ``config.rules`` is observed.

    The session itself never stops; reading continues until every observed
    rule has fired, the pool is exhausted, or the cap is hit. Unfired rules
    are recorded at the point reading ended, flagged ``capped``.
    """
    train, test = leave_one_out(corpora, test_name)
    session = SurveySession(
        test,
        train,
        SurveyConfig(
            m=config.m,
            classifier=config.classifier,
            stop=NeverStop(),
            seed=seed,
            min_df=config.min_df,
        ),
        matrices=matrices,
    )
    oracle = simulated_oracle(test)
    rules = {spec: parse_stop_spec(spec) for spec in config.rules}
    fired: dict[str, tuple[int, int, bool]] = {}  # spec -> reads, found, capped
    cap_reads = int(config.cap_fraction * len(test))

    while session.status == ACTIVE and len(fired) < len(rules):
        batch = session.next_batch()
        answers = {c.id: oracle.answer(c.id) for c in batch}
        report = session.submit_labels(answers)
        for spec, rule in rules.items():
            if spec in fired:
                continue
            decision = rule.evaluate(
                report.found, session.curve, session.labels_in_order, session.estimate
            )
            if decision.stop:
                fired[spec] = (report.reads, report.found, False)
        if session.reads >= cap_reads:
            break
    for spec in rules:
        if spec not in fired:
            fired[spec] = (session.reads, session.found, True)

    total_pos = test.positives()
    records = []
    for spec, (reads, found, capped) in fired.items():
        records.append(
            RunRecord(
                project=test_name,
                repeat=repeat,
                seed=seed,
                rule=spec,
                recall=recall(found, total_pos),
                cost=cost(reads, len(test)),
                reads=reads,
                found=found,
                total_positives=total_pos,
                corpus_size=len(test),
                batches=session.iteration,
                mean_batch_seconds=float(np.mean(session.iteration_seconds)),
                estimator_iterations=session.estimate.iterations if session.estimate else 0,
                capped=capped,
            )
        )
    curve = (list(session.curve.reads), list(session.curve.found))
    return records, curve


# worker-process state for the parallel rig
_WORKER_CORPORA: list[Corpus] | None = None


def _init_worker(corpora: list[Corpus]) -> None:
    global _WORKER_CORPORA
    _WORKER_CORPORA = corpora


def _project_task(args) -> tuple[list[RunRecord], dict]:
    test_name, project_index, config = args
    train, test = leave_one_out(_WORKER_CORPORA, test_name)
    matrices = build_matrices(test, train, min_df=config.min_df)
    records: list[RunRecord] = []
    curves: dict = {}
    for repeat in range(config.repeats):
        seed = seed_for(config.master_seed, project_index, repeat)
        recs, curve = run_survey_cell(
            _WORKER_CORPORA, test_name, seed, repeat, config, matrices=matrices
        )
        records.extend(recs)
        curves[(test_name, repeat)] = curve
    return records, curves


def run_standard_rig(corpora: list[Corpus], config: RigConfig | None = None) -> RigResult:
    """The leave-one-project-out rig: every project surveyed ``repeats``
    times with fresh seeds; medians and IQRs aggregate over the grid."""
    config = config or RigConfig()
    if len(corpora) < 2:
        raise ValueError("the rig needs at least 2 projects")
    names = sorted(c.name for c in corpora)
    tasks = [(name, i, config) for i, name in enumerate(names)]

    records: list[RunRecord] = []
    curves: dict = {}
    if config.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=config.jobs, initializer=_init_worker, initargs=(corpora,)
        ) as pool:
            for recs, cur in pool.map(_project_task, tasks):
                records.extend(recs)
                curves.update(cur)
    else:
        _init_worker(corpora)
        for task in tasks:
            recs, cur = _project_task(task)
            records.extend(recs)
            curves.update(cur)

    cfg = asdict(config)
    cfg["rules"] = list(config.rules)
    return RigResult(records=records, config=cfg, curves=curves)


# ---------------------------------------------------------------------------
# classify-only (no surveying): cross-project ensemble agreement


def _classify_once(matrices: SessionMatrices, test: Corpus, k: int, sample_fraction: float, seed: int) -> float:
    ens = train_ensemble(
        matrices.X_train, matrices.y_train, k=k, sample_fraction=sample_fraction, seed=seed
    )
    predicted = ensemble_classify(ens, matrices.X_test)
    truth = np.array([bool(c.label) for c in test.comments])
    return recall(int((predicted & truth).sum()), int(truth.sum()))


def classify_only_recall(
    corpora: list[Corpus],
    test_name: str,
    k: int | None = None,
    sample_fraction: float = 0.9,
    seed: int = 0,
    min_df: int = 1,
) -> float:
    """Train the tree ensemble on the other projects, classify the test
    project by strict majority vote, and report recall against its labels."""
    train, test = leave_one_out(corpora, test_name)
    k = k if k is not None else len(corpora) - 1
    matrices = build_matrices(test, train, min_df=min_df)
    return _classify_once(matrices, test, k, sample_fraction, seed)


def _classify_task(args):
    test_name, project_index, repeats, master_seed = args
    train, test = leave_one_out(_WORKER_CORPORA, test_name)
    matrices = build_matrices(test, train)
    k = len(_WORKER_CORPORA) - 1
    vals = [
        _classify_once(matrices, test, k, 0.9, seed_for(master_seed, project_index, r))
        for r in range(repeats)
    ]
    return test_name, median(vals)


def classify_only_table(
    corpora: list[Corpus], repeats: int = 3, master_seed: int = 1, jobs: int = 1
) -> dict[str, float]:
    """Median classify-only recall per project."""
    names = sorted(c.name for c in corpora)
    tasks = [(name, i, repeats, master_seed) for i, name in enumerate(names)]
    out: dict[str, float] = {}
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(corpora,)
        ) as pool:
            for name, val in pool.map(_classify_task, tasks):
                out[name] = val
    else:
        _init_worker(corpora)
        for task in tasks:
            name, val = _classify_task(task)
            out[name] = val
    return out


# ---------------------------------------------------------------------------
# report emission


def emit_report(result: RigResult, out_dir: str | Path, classify: dict[str, float] | None = None) -> list[Path]:
    """Write the raw grid, per-rule summaries, and per-run retrieval curves.

    Re-emission of the same result produces identical bytes.
    """
    if not result.records:
        raise ValueError("empty rig result")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    grid = out_dir / "grid.tsv"
    cols = [
        "rule", "project", "repeat", "seed", "recall", "cost", "reads", "found",
        "total_positives", "corpus_size", "batches", "mean_batch_seconds",
        "estimator_iterations", "capped",
    ]
    with open(grid, "w", encoding="utf-8") as f:
        f.write("\t".join(cols) + "\n")
        for r in sorted(result.records, key=lambda r: (r.rule, r.project, r.repeat)):
            f.write(
                f"{r.rule}\t{r.project}\t{r.repeat}\t{r.seed}\t{r.recall:.4f}\t{r.cost:.4f}\t"
                f"{r.reads}\t{r.found}\t{r.total_positives}\t{r.corpus_size}\t{r.batches}\t"
                f"{r.mean_batch_seconds:.6f}\t{r.estimator_iterations}\t{int(r.capped)}\n"
            )
    written.append(grid)

    summary = out_dir / "summary_by_rule.tsv"
    with open(summary, "w", encoding="utf-8") as f:
        f.write("rule\tproject\trecall\tcost\n")
        for rule in result.rules():
            recalls = result.per_project(rule, "recall")
            costs = result.per_project(rule, "cost")
            for p in result.projects():
                f.write(f"{rule}\t{p}\t{recalls[p]:.2f}\t{costs[p]:.2f}\n")
            mr, ir = result.overall(rule, "recall")
            mc, ic = result.overall(rule, "cost")
            f.write(f"{rule}\tMEDIAN\t{mr:.2f}\t{mc:.2f}\n")
            f.write(f"{rule}\tIQR\t{ir:.2f}\t{ic:.2f}\n")
    written.append(summary)

    if classify is not None:
        tbl = out_dir / "classify_summary.tsv"
        with open(tbl, "w", encoding="utf-8") as f:
            f.write("project\trecall\tdisagreement\n")
            for name in sorted(classify, key=lambda n: -classify[n]):
                f.write(f"{name}\t{classify[name]:.2f}\t{100 - classify[name]:.2f}\n")
            f.write(f"MEDIAN\t{median(classify.values()):.2f}\t{100 - median(classify.values()):.2f}\n")
        written.append(tbl)

    curve_dir = out_dir / "curves"
    curve_dir.mkdir(exist_ok=True)
    for (project, repeat), (reads, found) in sorted(result.curves.items()):
        path = curve_dir / f"{project}_r{repeat:02d}.tsv"
        with open(path, "w", encoding="utf-8") as f:
            f.write("reads\tfound\n")
            for x, y in zip(reads, found):
                f.write(f"{x}\t{y}\n")
        written.append(path)

    meta = out_dir / "config.json"
    with open(meta, "w", encoding="utf-8") as f:
        json.dump(result.config, f, indent=2, sort_keys=True)
        f.write("\n")
    written.append(meta)
    return written


def load_benchmark(data_dir: str | Path, fmt: str = "default") -> list[Corpus]:
    """Convenience wrapper used by the CLI and demos."""
    return discover_corpora(data_dir, fmt=fmt)
