"""Corpus-induced stop-lists.

A stop-list is the set of words that occur at least ``min_count`` times in
a handful of randomly sampled training files of comparable size. Stopped
words are barred from feature candidacy downstream.
"""

from __future__ import annotations

import hashlib
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from wsdkit.corpus import LexeltDataset


@dataclass(frozen=True)
class StopList:
    """Exact-match set of normalized token surfaces plus the provenance
    (sampled lexelts, seed, min_count) that determines it."""

    words: frozenset[str]
    sampled_lexelts: tuple[str, ...] = ()
    seed: int | None = None
    min_count: int = 0

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    def __len__(self) -> int:
        return len(self.words)

    def digest(self) -> str:
        """Short content hash, recorded in feature-selection metadata."""
        h = hashlib.sha256("\n".join(sorted(self.words)).encode("utf-8"))
        return h.hexdigest()[:12]


EMPTY_STOPLIST = StopList(frozenset())


def build_stoplist(
    datasets: Sequence[LexeltDataset],
    seed: int | None = 42,
    sample_size: int = 5,
    min_count: int = 10,
) -> StopList:
    """Induce a stop-list by sampling training files and thresholding counts.

    Eligible files are the lexelts whose training token count lies within
    +/-25% of the median over all lexelts ("comparable size");
    ``sample_size`` of them are drawn uniformly without replacement, and
    the result contains exactly the tokens whose aggregate count over the
    sampled files is >= ``min_count``. Deterministic given the seed; if
    fewer than ``sample_size`` eligible files exist, all of them are used.
    """
    nonempty = [ds for ds in datasets if ds.train]
    if not nonempty:
        raise ValueError("cannot build a stop-list: all training splits are empty")

    sizes = {ds.lexelt: sum(len(inst.tokens) for inst in ds.train) for ds in nonempty}
    median = statistics.median(sizes.values())
    eligible = [ds for ds in nonempty if 0.75 * median <= sizes[ds.lexelt] <= 1.25 * median]
    if not eligible:
        # degenerate size distribution: the band can miss every file
        eligible = nonempty
    eligible.sort(key=lambda ds: ds.lexelt)

    if len(eligible) <= sample_size:
        sampled = eligible
    else:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        picks = rng.choice(len(eligible), size=sample_size, replace=False)
        sampled = [eligible[i] for i in sorted(picks)]

    counts: Counter[str] = Counter()
    for ds in sampled:
        for inst in ds.train:
            counts.update(inst.tokens)
    words = frozenset(w for w, c in counts.items() if c >= min_count)
    return StopList(
        words=words,
        sampled_lexelts=tuple(ds.lexelt for ds in sampled),
        seed=seed,
        min_count=min_count,
    )


def is_stopped(word: str, stoplist: StopList) -> bool:
    """True iff the word, normalized, is in the stop-list."""
    return word in stoplist


def write_stoplist(stoplist: StopList, path) -> None:
    """One word per line, UTF-8, sorted."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for word in sorted(stoplist.words):
            fh.write(word + "\n")


def read_stoplist(path) -> StopList:
    with open(path, encoding="utf-8") as fh:
        words = frozenset(line.strip() for line in fh if line.strip())
    return StopList(words=words)
