"""Loading and partitioning of labeled code-comment datasets.

A dataset is one CSV file per project with columns naming the project,
the raw classification string, and the comment text. Labels are binarized:
the designated negative marker means "not technical debt", anything else
means "technical debt".
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path

logger = logging.getLogger(__name__)

# Raw classification value that binarizes to False (case-insensitive).
NEGATIVE_MARKER = "without_classification"

# format id -> header names for (project, classification, text) columns
FORMATS = {
    "default": ("projectname", "classification", "commenttext"),
}


class SchemaError(ValueError):
    """The input file lacks a required column."""


class EmptyCorpusError(ValueError):
    """The input file has a header but no usable rows."""


@dataclass(frozen=True)
class Comment:
    """One code comment. ``label`` is None until binarized/assigned."""

    id: int
    project: str
    text: str
    label: bool | None = None
    raw_label: str | None = None


@dataclass
class Corpus:
    name: str
    comments: list[Comment]

    def __len__(self) -> int:
        return len(self.comments)

    def __iter__(self):
        return iter(self.comments)

    def texts(self) -> list[str]:
        return [c.text for c in self.comments]

    def labels(self) -> list[bool | None]:
        return [c.label for c in self.comments]

    def positives(self) -> int:
        return sum(1 for c in self.comments if c.label is True)

    def fully_labeled(self) -> bool:
        return all(c.label is not None for c in self.comments)

    def prevalence(self) -> float:
        if not self.comments:
            return 0.0
        return self.positives() / len(self.comments)


def binarize_label(raw: str) -> bool:
    """True unless the raw classification is the negative marker."""
    return raw.strip().lower() != NEGATIVE_MARKER


def binarize_labels(corpus: Corpus) -> Corpus:
    """Return a copy of ``corpus`` with binary labels derived from raw ones."""
    out = []
    for c in corpus.comments:
        if c.raw_label is None:
            raise ValueError(f"comment {c.id} has no raw classification")
        out.append(replace(c, label=binarize_label(c.raw_label)))
    return Corpus(corpus.name, out)


def load_corpus(
    path: str | Path,
    fmt: str = "default",
    name: str | None = None,
    binarize: bool = True,
) -> Corpus:
    """Load one project CSV into a Corpus.

    Rows keep file order; ids are assigned 0..n-1 over the retained rows.
    Rows whose text is empty after trimming are dropped (count is logged).
    """
    path = Path(path)
    proj_col, label_col, text_col = FORMATS[fmt]
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in (proj_col, label_col, text_col):
            if col not in header:
                raise SchemaError(f"missing column {col!r} in {path}")
        comments: list[Comment] = []
        dropped = 0
        for row in reader:
            text = (row[text_col] or "").strip()
            if not text:
                dropped += 1
                continue
            comments.append(
                Comment(
                    id=len(comments),
                    project=row[proj_col],
                    text=text,
                    raw_label=row[label_col],
                )
            )
    if dropped:
        logger.info("dropped %d empty-text rows from %s", dropped, path)
    if not comments:
        raise EmptyCorpusError(f"no usable rows in {path}")
    corpus = Corpus(name or path.stem, comments)
    return binarize_labels(corpus) if binarize else corpus


def discover_corpora(data_dir: str | Path, fmt: str = "default") -> list[Corpus]:
    """Load every ``*.csv`` under ``data_dir``, one corpus per file.

    Files are taken in sorted name order so the result is reproducible.
    """
    data_dir = Path(data_dir)
    paths = sorted(data_dir.glob("*.csv"))
    if not paths:
        raise EmptyCorpusError(f"no CSV files in {data_dir}")
    return [load_corpus(p, fmt=fmt) for p in paths]


def leave_one_out(corpora: list[Corpus], test_name: str) -> tuple[Corpus, Corpus]:
    """Split into (train, test): test is the named corpus, train is the rest.

    Train comments get fresh sequential ids; the test corpus is untouched.
    """
    names = [c.name for c in corpora]
    if test_name not in names:
        raise LookupError(f"unknown project {test_name!r}; have {names}")
    test = corpora[names.index(test_name)]
    merged: list[Comment] = []
    for corp in corpora:
        if corp.name == test_name:
            continue
        for c in corp.comments:
            merged.append(replace(c, id=len(merged)))
    train = Corpus(f"train-without-{test_name}", merged)
    return train, test
