"""Deterministic benchmark-corpus generator.

The public ten-project comment datasets used for debt studies cannot be
redistributed here, so this module synthesizes an equivalent benchmark:
ten projects whose per-project comment and debt counts match the published
study data exactly, with text whose difficulty profile (how recognizable
debt comments are, how much they transfer across projects, how much
debt-looking noise the negatives carry) is tuned per project so that
cross-project classifiers and survey runs behave like they do on the real
corpora.

Everything is reproducible: a single seed determines every byte written.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# -- token pools -------------------------------------------------------------

_STEMS = """
value index buffer parser stream thread handler config window widget event
listener socket client server query schema column row table cache token
module loader filter mapper reader writer logger session request response
header footer layout render paint canvas shape vector matrix node graph
tree branch leaf root path route batch queue stack heap pool block chunk
field method class object array string number double float byte char flag
state status result error warning message signal action command option
param input output stream meta data file folder archive bundle package
version release build deploy test mock stub proxy adapter bridge facade
update insert delete select commit rollback merge split join sort search
scan parse format encode decode compress expand validate verify check
init setup teardown start stop pause resume reset clear flush sync lock
unlock wait notify dispatch schedule retry timeout limit bound range
"""

_VERBS = """
handle process compute resolve convert translate wrap unwrap bind unbind
attach detach register lookup fetch store load save copy move swap fill
drain emit consume produce apply revert skip keep drop mark trace count
"""

_GENERIC_DEBT = """
todo fixme hack xxx workaround kludge hacky broken ugly temporary temp
crap nasty wtf revisit cleanup refactor smell messy fragile brittle
deprecated obsolete legacy quickfix bandaid stopgap klunky awkward dirty
rework rethink problematic suboptimal inefficient clumsy shaky flaky
unsafe wrong bogus dubious dodgy cruft evil gross
"""


def _words(block: str) -> list[str]:
    return block.split()


def _compound_tokens(rng: np.random.Generator, stems: list[str], count: int, lo=None) -> list[str]:
    out = []
    seen = set(stems)
    while len(out) < count:
        a, b = rng.choice(len(stems), size=2, replace=False)
        tok = stems[a] + stems[b]
        if tok not in seen:
            seen.add(tok)
            out.append(tok)
    return out


class _WeightedPool:
    """Zipf-weighted token pool with vectorized sampling."""

    def __init__(self, tokens: list[str], zipf: float = 0.85):
        self.tokens = np.array(tokens, dtype=object)
        w = 1.0 / np.arange(3, len(tokens) + 3, dtype=np.float64) ** zipf
        self._cum = np.cumsum(w / w.sum())

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.tokens[np.searchsorted(self._cum, rng.random(size))]


# -- project profiles --------------------------------------------------------


@dataclass(frozen=True)
class ProjectProfile:
    """Size and difficulty knobs for one generated project.

    generic_rate: chance a debt marker is drawn from the shared debt
    vocabulary (high = debt style transfers across projects).
    silent_rate: fraction of debt comments carrying no marker at all.
    bait_rate: fraction of clean comments carrying one debt-looking token.
    extra_marker: chance for each of up to two additional marker tokens
    (high = debt comments co-mention several markers, so reviewer feedback
    teaches the project's own debt idiom quickly).
    bait_generic: share of bait tokens drawn from the shared vocabulary
    rather than the project's own.
    local_pool: how many distinct project-local debt tokens exist (small =
    each repeats often and is easy to learn from a few examples).
    """

    name: str
    comments: int
    satd: int
    generic_rate: float
    silent_rate: float
    bait_rate: float
    extra_marker: float = 0.45
    bait_generic: float = 0.35
    local_pool: int = 22


BENCHMARK_PROFILES: tuple[ProjectProfile, ...] = (
    ProjectProfile("ant", 4098, 131, 0.17, 0.06, 0.02, extra_marker=0.70, local_pool=10),
    ProjectProfile("argouml", 9452, 1413, 0.88, 0.05, 0.010),
    ProjectProfile("columba", 6468, 204, 0.88, 0.02, 0.02),
    ProjectProfile("emf", 4390, 104, 0.36, 0.10, 0.04, extra_marker=0.70, local_pool=10),
    ProjectProfile("hibernate", 2968, 472, 0.63, 0.03, 0.015),
    ProjectProfile("jedit", 10322, 256, 0.16, 0.09, 0.04, extra_marker=0.70, local_pool=10),
    ProjectProfile("jfreechart", 4408, 209, 0.60, 0.26, 0.02),
    ProjectProfile("jmeter", 8057, 374, 0.68, 0.03, 0.02),
    ProjectProfile("jruby", 4897, 622, 0.89, 0.02, 0.012),
    ProjectProfile("sql12", 7215, 286, 0.45, 0.05, 0.03, extra_marker=0.50, local_pool=18),
)

_POSITIVE_KINDS = ("DESIGN", "REQUIREMENT", "DEFECT", "TEST", "DOCUMENTATION")
_POSITIVE_KIND_W = (0.55, 0.25, 0.10, 0.05, 0.05)
_NEGATIVE_KIND = "WITHOUT_CLASSIFICATION"


class _Pools:
    """All token pools for one benchmark, derived from one seed."""

    def __init__(self, profiles, seed: int):
        rng = np.random.default_rng((seed, 0xC0FFEE))
        stems = _words(_STEMS) + _words(_VERBS)
        common = list(stems) + _compound_tokens(rng, stems, 1200)
        self.common = _WeightedPool(common)
        self.generic_debt = _WeightedPool(_words(_GENERIC_DEBT))
        self.flavor: dict[str, _WeightedPool] = {}
        self.local_debt: dict[str, _WeightedPool] = {}
        for prof in profiles:
            prng = np.random.default_rng((seed, 1, hash_name(prof.name)))
            self.flavor[prof.name] = _WeightedPool(_compound_tokens(prng, stems, 48))
            self.local_debt[prof.name] = _WeightedPool(_compound_tokens(prng, stems, prof.local_pool))
        self.all_flavor = _WeightedPool(
            [t for p in profiles for t in self.flavor[p.name].tokens]
        )
        self.all_local_debt = _WeightedPool(
            [t for p in profiles for t in self.local_debt[p.name].tokens]
        )


def hash_name(name: str) -> int:
    """Stable small hash (process-independent, unlike ``hash``)."""
    h = 2166136261
    for ch in name.encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h


def _background(rng, pools: _Pools, project: str, lengths: np.ndarray) -> list[list[str]]:
    """Background tokens for each comment: mostly shared vocabulary and the
    project's own flavor, plus a rare sprinkle of other projects' flavor and
    debt-marker tokens so every token occurs benignly somewhere."""
    total = int(lengths.sum())
    kinds = rng.random(total)
    own_flavor = pools.flavor[project].sample(rng, total)
    common = pools.common.sample(rng, total)
    other_flavor = pools.all_flavor.sample(rng, total)
    other_local = pools.all_local_debt.sample(rng, total)
    flat = np.where(
        kinds < 0.78,
        common,
        np.where(kinds < 0.95, own_flavor, np.where(kinds < 0.98, other_flavor, other_local)),
    )
    out = []
    pos = 0
    for n in lengths:
        out.append(list(flat[pos : pos + n]))
        pos += n
    return out


def generate_project(profile: ProjectProfile, pools: _Pools, seed: int) -> list[tuple[str, str, str]]:
    """Rows (project, classification, text) for one project, shuffled."""
    rng = np.random.default_rng((seed, 2, hash_name(profile.name)))
    n, n_pos = profile.comments, profile.satd
    n_neg = n - n_pos

    lengths = rng.integers(7, 24, size=n)
    backgrounds = _background(rng, pools, profile.name, lengths)

    rows: list[tuple[str, str, str]] = []

    # debt comments
    for i in range(n_pos):
        toks = backgrounds[i]
        if rng.random() >= profile.silent_rate:
            n_markers = 1 + int(rng.random() < profile.extra_marker) + int(
                rng.random() < profile.extra_marker
            )
            for _ in range(n_markers):
                pool = (
                    pools.generic_debt
                    if rng.random() < profile.generic_rate
                    else pools.local_debt[profile.name]
                )
                marker = str(pool.sample(rng, 1)[0])
                toks.append(marker)
                if rng.random() < 0.25:
                    toks.append(marker)
        rng.shuffle(toks)
        kind = _POSITIVE_KINDS[
            int(np.searchsorted(np.cumsum(_POSITIVE_KIND_W), rng.random()))
        ]
        rows.append((profile.name, kind, " ".join(toks)))

    # clean comments, a slice of them carrying one debt-looking token
    for i in range(n_pos, n):
        toks = backgrounds[i]
        if rng.random() < profile.bait_rate:
            pool = (
                pools.generic_debt
                if rng.random() < profile.bait_generic
                else pools.local_debt[profile.name]
            )
            toks.append(str(pool.sample(rng, 1)[0]))
        rng.shuffle(toks)
        rows.append((profile.name, _NEGATIVE_KIND, " ".join(toks)))

    order = rng.permutation(n)
    return [rows[i] for i in order]


def write_benchmark(
    out_dir: str | Path,
    seed: int = 7,
    profiles: tuple[ProjectProfile, ...] = BENCHMARK_PROFILES,
) -> list[Path]:
    """Write one CSV per project into ``out_dir``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pools = _Pools(profiles, seed)
    paths = []
    for prof in profiles:
        rows = generate_project(prof, pools, seed)
        path = out_dir / f"{prof.name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["projectname", "classification", "commenttext"])
            writer.writerows(rows)
        paths.append(path)
    return paths
