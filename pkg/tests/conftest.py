import numpy as np
import pytest

from satdsurvey.corpus import Comment, Corpus

DEBT_WORDS = ["todo", "fixme", "hack", "workaround", "kludge", "broken"]
CALM_WORDS = [
    "parser", "buffer", "stream", "window", "handler", "config", "socket",
    "column", "render", "layout", "queue", "branch", "cache", "schema",
    "filter", "mapper", "logger", "session", "request", "response",
]


def toy_corpus(name: str, n: int, prevalence: float, seed: int = 0, marker_rate: float = 1.0) -> Corpus:
    """Small labeled corpus: debt comments carry a debt word (with
    probability ``marker_rate``), clean ones only calm words."""
    rng = np.random.RandomState(seed)
    comments = []
    n_pos = max(1, int(round(n * prevalence)))
    for i in range(n):
        positive = i < n_pos
        words = list(rng.choice(CALM_WORDS, size=rng.randint(4, 9)))
        if positive and rng.rand() < marker_rate:
            words.append(DEBT_WORDS[rng.randint(len(DEBT_WORDS))])
        rng.shuffle(words)
        comments.append(
            Comment(id=0, project=name, text=" ".join(words), label=positive, raw_label=None)
        )
    order = rng.permutation(n)
    shuffled = [comments[int(j)] for j in order]
    final = [
        Comment(id=i, project=c.project, text=c.text, label=c.label, raw_label=c.raw_label)
        for i, c in enumerate(shuffled)
    ]
    return Corpus(name, final)


@pytest.fixture
def toy_pair():
    """A (train, test) pair of small separable corpora."""
    train = toy_corpus("train", 400, 0.2, seed=1)
    test = toy_corpus("test", 240, 0.15, seed=2)
    return train, test
