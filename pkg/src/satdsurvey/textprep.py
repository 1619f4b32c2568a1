"""Tokenization and TF-IDF feature extraction.

The exact weighting is pinned so results are reproducible bit-for-bit:
tf is the raw in-document count, idf(t) = ln((1 + N) / (1 + df(t))) + 1,
and every nonzero row is L2-normalized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

# lower-cased alphanumeric runs of length >= 2; everything else separates
TOKEN_RE = re.compile(r"[a-z0-9]{2,}")


class EmptyVocabularyError(ValueError):
    """No term survived vocabulary fitting."""


def tokenize(text: str) -> list[str]:
    return TOKEN_RE.findall(text.lower())


@dataclass
class Vocabulary:
    """Term -> column map with the document frequencies seen at fit time."""

    index: dict[str, int]
    doc_freq: np.ndarray
    n_docs: int

    def __len__(self) -> int:
        return len(self.index)

    def idf(self) -> np.ndarray:
        return np.log((1.0 + self.n_docs) / (1.0 + self.doc_freq)) + 1.0


def fit_vocabulary(docs: list[str], min_df: int = 1) -> Vocabulary:
    """Build a vocabulary over all tokens appearing in >= min_df documents.

    Column indices are assigned in lexicographic term order, which makes
    the mapping independent of document order.
    """
    if not docs:
        raise ValueError("fit_vocabulary needs at least one document")
    df: dict[str, int] = {}
    for doc in docs:
        for tok in set(tokenize(doc)):
            df[tok] = df.get(tok, 0) + 1
    terms = sorted(t for t, n in df.items() if n >= min_df)
    if not terms:
        raise EmptyVocabularyError("no term meets min_df; are all documents empty?")
    index = {t: i for i, t in enumerate(terms)}
    freq = np.array([df[t] for t in terms], dtype=np.int64)
    return Vocabulary(index=index, doc_freq=freq, n_docs=len(docs))


def transform(docs: list[str], vocab: Vocabulary) -> sp.csr_matrix:
    """TF-IDF matrix for ``docs`` under a fitted vocabulary.

    Out-of-vocabulary tokens are ignored; documents with no known token
    become all-zero rows.
    """
    idf = vocab.idf()
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        counts: dict[int, int] = {}
        for tok in tokenize(doc):
            col = vocab.index.get(tok)
            if col is not None:
                counts[col] = counts.get(col, 0) + 1
        if counts:
            cols = sorted(counts)
            row = np.array([counts[c] * idf[c] for c in cols])
            norm = np.linalg.norm(row)
            if norm > 0:
                row /= norm
            indices.extend(cols)
            data.extend(row)
        indptr.append(len(indices))
    X = sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int32), indptr),
        shape=(len(docs), len(vocab)),
    )
    X.eliminate_zeros()
    return X
