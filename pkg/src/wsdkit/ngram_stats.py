"""Lexical feature statistics over a lexelt's training instances.

Counts unigrams, (gapped) bigram windows, and head-adjacent co-occurrences,
scores candidate pairs with the G-squared log-likelihood ratio over 2x2
contingency tables, and selects feature sets by frequency and significance
thresholds. All counting is per lexelt and reads training instances only.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from wsdkit.corpus import Instance
from wsdkit.stoplist import EMPTY_STOPLIST, StopList

KINDS = ("unigram", "bigram", "cooccurrence", "gapped_bigram")

# conventional thresholds: chi-square critical values at 1 df
G2_P10 = 2.706
G2_P01 = 6.635
G2_P001 = 10.827


@dataclass(frozen=True)
class ContingencyTable:
    """Observed 2x2 counts for a candidate word pair.

    n11 counts windows where the pair was observed; margins are derived
    (n1p = n11 + n12, np1 = n11 + n21, npp = grand total).
    """

    n11: int
    n12: int
    n21: int
    n22: int

    def __post_init__(self):
        if min(self.n11, self.n12, self.n21, self.n22) < 0:
            raise ValueError(f"negative cell in contingency table {self}")

    @classmethod
    def from_margins(cls, n11: int, n1p: int, np1: int, npp: int) -> "ContingencyTable":
        return cls(n11, n1p - n11, np1 - n11, npp - n1p - np1 + n11)

    @property
    def n1p(self) -> int:
        return self.n11 + self.n12

    @property
    def np1(self) -> int:
        return self.n11 + self.n21

    @property
    def npp(self) -> int:
        return self.n11 + self.n12 + self.n21 + self.n22


def g_squared(table: ContingencyTable) -> float:
    """Log-likelihood ratio statistic for a 2x2 table.

    G2 = 2 * sum_ij n_ij * ln(n_ij / m_ij), with expected counts
    m_ij = (row marginal * column marginal) / npp and the 0*ln(0) term
    taken as 0. Non-negative, and 0 exactly when every observed cell
    equals its expectation.
    """
    npp = table.npp
    if npp <= 0:
        raise ValueError("g_squared requires a non-empty table (npp > 0)")
    rows = (table.n1p, npp - table.n1p)
    cols = (table.np1, npp - table.np1)
    cells = ((table.n11, table.n12), (table.n21, table.n22))
    total = 0.0
    for i in range(2):
        for j in range(2):
            n = cells[i][j]
            if n > 0:
                expected = rows[i] * cols[j] / npp
                total += n * math.log(n / expected)
    # floating-point noise can leave a tiny negative residue
    return max(2.0 * total, 0.0)


@dataclass(frozen=True)
class Feature:
    """One selected lexical feature.

    ``words`` holds 1 surface (unigram) or 2 ordered surfaces; ``side``
    is meaningful only for co-occurrences and ``max_gap`` only for gapped
    bigrams. Features compare equal iff all fields are equal.
    """

    kind: str
    words: tuple[str, ...]
    side: str = "none"
    max_gap: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        expected_words = 1 if self.kind == "unigram" else 2
        if len(self.words) != expected_words:
            raise ValueError(f"{self.kind} feature needs {expected_words} word(s)")
        if self.kind == "cooccurrence":
            if self.side not in ("left", "right"):
                raise ValueError("cooccurrence feature needs side 'left' or 'right'")
        elif self.side != "none":
            raise ValueError(f"{self.kind} feature cannot carry a side")
        if self.kind == "gapped_bigram":
            if not 0 <= self.max_gap <= 2:
                raise ValueError("gapped bigram max_gap must be 0..2")
        elif self.max_gap != 0:
            raise ValueError(f"{self.kind} feature cannot carry a gap")


@dataclass(frozen=True)
class FeatureStat:
    freq: int
    g2: float


@dataclass(frozen=True)
class SelectionInfo:
    """Parameters a feature set was selected under."""

    kind: str
    min_freq: int
    g2_min: float | None
    stoplist_digest: str
    max_gap: int = 0


@dataclass(frozen=True)
class FeatureSet:
    """Ordered, duplicate-free features plus their selection metadata.

    The ordering is fixed at selection time and defines the bit positions
    of every vector built from the set.
    """

    features: tuple[Feature, ...]
    stats: tuple[FeatureStat, ...]
    selection: tuple[SelectionInfo, ...]

    def __post_init__(self):
        if len(self.features) != len(set(self.features)):
            raise ValueError("feature set contains duplicates")
        if len(self.stats) != len(self.features):
            raise ValueError("stats must parallel features")

    def __len__(self) -> int:
        return len(self.features)

    @property
    def max_gap(self) -> int:
        """Widest window any feature in the set needs."""
        return max((f.max_gap for f in self.features), default=0)


def count_unigrams(
    instances: Sequence[Instance], stoplist: StopList = EMPTY_STOPLIST
) -> dict[str, int]:
    """Count every non-stopped token occurrence across instance contexts."""
    counts: Counter[str] = Counter()
    for inst in instances:
        counts.update(tok for tok in inst.tokens if tok not in stoplist)
    return dict(counts)


@dataclass
class PairCounts:
    """Ordered-pair window counts plus the margins needed for 2x2 tables.

    A window is an ordered token pair with at most ``max_gap`` intervening
    tokens, never crossing an instance boundary. ``counts`` holds candidate
    pairs only (a pair is dropped when both constituents are stoplisted);
    margins and the window total cover every window so tables stay
    consistent.
    """

    counts: dict[tuple[str, str], int]
    first: dict[str, int]
    second: dict[str, int]
    total: int
    max_gap: int

    def table(self, pair: tuple[str, str]) -> ContingencyTable:
        return ContingencyTable.from_margins(
            n11=self.counts.get(pair, 0),
            n1p=self.first.get(pair[0], 0),
            np1=self.second.get(pair[1], 0),
            npp=self.total,
        )


def count_bigrams(
    instances: Sequence[Instance],
    stoplist: StopList = EMPTY_STOPLIST,
    max_gap: int = 0,
) -> PairCounts:
    """Count ordered pairs with 0..max_gap intervening tokens.

    max_gap=0 counts plain adjacent bigrams. Counts for a pair sum over
    all admissible gaps.
    """
    if max_gap not in (0, 1, 2):
        raise ValueError("max_gap must be 0, 1 or 2")
    counts: Counter[tuple[str, str]] = Counter()
    first: Counter[str] = Counter()
    second: Counter[str] = Counter()
    total = 0
    for inst in instances:
        toks = inst.tokens
        n = len(toks)
        for i in range(n):
            for j in range(i + 1, min(i + 2 + max_gap, n)):
                total += 1
                first[toks[i]] += 1
                second[toks[j]] += 1
                if toks[i] in stoplist and toks[j] in stoplist:
                    continue
                counts[(toks[i], toks[j])] += 1
    return PairCounts(dict(counts), dict(first), dict(second), total, max_gap)


@dataclass
class CooccurrenceCounts:
    """Immediate left/right neighbors of the target head, with margins.

    n11 for (word, side) is the number of instances where ``word`` sits
    immediately on that side of the head. The word margin is taken over
    all adjacent token windows of the training contexts; the opposing
    margin is the number of head windows for that side; npp is the total
    adjacent-window count.
    """

    counts: dict[tuple[str, str], int]
    first: dict[str, int]
    second: dict[str, int]
    left_windows: int
    right_windows: int
    total: int

    def table(self, word: str, side: str) -> ContingencyTable:
        n11 = self.counts.get((word, side), 0)
        if side == "left":
            n1p, np1 = self.first.get(word, 0), self.left_windows
        elif side == "right":
            n1p, np1 = self.right_windows, self.second.get(word, 0)
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return ContingencyTable.from_margins(n11=n11, n1p=n1p, np1=np1, npp=self.total)


def extract_cooccurrences(instances: Sequence[Instance]) -> CooccurrenceCounts:
    """Count the tokens immediately adjacent to each instance's head.

    A head at the context edge contributes nothing for the missing side.
    """
    counts: Counter[tuple[str, str]] = Counter()
    first: Counter[str] = Counter()
    second: Counter[str] = Counter()
    left_windows = right_windows = total = 0
    for inst in instances:
        toks = inst.tokens
        ti = inst.target_index
        for i in range(len(toks) - 1):
            total += 1
            first[toks[i]] += 1
            second[toks[i + 1]] += 1
        if ti > 0:
            counts[(toks[ti - 1], "left")] += 1
            left_windows += 1
        if ti < len(toks) - 1:
            counts[(toks[ti + 1], "right")] += 1
            right_windows += 1
    return CooccurrenceCounts(
        dict(counts), dict(first), dict(second), left_windows, right_windows, total
    )


def _ordered(entries: list[tuple[Feature, int, float]]) -> tuple[tuple, tuple]:
    # descending G2, then descending frequency, then lexicographic
    entries.sort(key=lambda e: (-e[2], -e[1], e[0].words, e[0].side))
    features = tuple(e[0] for e in entries)
    stats = tuple(FeatureStat(freq=e[1], g2=e[2]) for e in entries)
    return features, stats


def select_features(
    counts,
    kind: str,
    min_freq: int,
    g2_min: float | None = None,
    stoplist: StopList = EMPTY_STOPLIST,
    max_gap: int = 0,
    exclude_stopped_cooccurrence: bool = False,
) -> FeatureSet:
    """Select a feature set by frequency and significance thresholds.

    A candidate is included iff its frequency is >= min_freq and (for
    kinds carrying a significance test) its G2 is >= g2_min. Unigrams
    carry no test and pass g2_min=None. Ordering is deterministic:
    descending G2, then descending frequency, then lexicographic.

    ``counts`` is the matching count structure: a unigram mapping,
    PairCounts for bigram/gapped_bigram, or CooccurrenceCounts.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown feature kind {kind!r}")
    if min_freq < 0 or (g2_min is not None and g2_min < 0):
        raise ValueError("thresholds must be non-negative")

    entries: list[tuple[Feature, int, float]] = []
    if kind == "unigram":
        for word, freq in counts.items():
            if freq >= min_freq:
                entries.append((Feature("unigram", (word,)), freq, 0.0))
    elif kind in ("bigram", "gapped_bigram"):
        gap = counts.max_gap if kind == "gapped_bigram" else 0
        if kind == "bigram" and counts.max_gap != 0:
            raise ValueError("plain bigram selection needs max_gap=0 counts")
        for pair, freq in counts.counts.items():
            if freq < min_freq:
                continue
            g2 = g_squared(counts.table(pair))
            if g2_min is not None and g2 < g2_min:
                continue
            entries.append((Feature(kind, pair, max_gap=gap), freq, g2))
        max_gap = gap
    elif kind == "cooccurrence":
        for (word, side), freq in counts.counts.items():
            if freq < min_freq:
                continue
            if exclude_stopped_cooccurrence and word in stoplist:
                continue
            g2 = g_squared(counts.table(word, side))
            if g2_min is not None and g2 < g2_min:
                continue
            entries.append((Feature("cooccurrence", (word,), side=side), freq, g2))

    features, stats = _ordered(entries)
    info = SelectionInfo(
        kind=kind,
        min_freq=min_freq,
        g2_min=g2_min,
        stoplist_digest=stoplist.digest(),
        max_gap=max_gap if kind == "gapped_bigram" else 0,
    )
    return FeatureSet(features=features, stats=stats, selection=(info,))


def merge_feature_sets(sets: Sequence[FeatureSet]) -> FeatureSet:
    """Union feature sets, preserving each set's order and dropping dupes."""
    features: list[Feature] = []
    stats: list[FeatureStat] = []
    seen: set[Feature] = set()
    selection: list[SelectionInfo] = []
    for fs in sets:
        selection.extend(fs.selection)
        for feat, stat in zip(fs.features, fs.stats):
            if feat not in seen:
                seen.add(feat)
                features.append(feat)
                stats.append(stat)
    return FeatureSet(tuple(features), tuple(stats), tuple(selection))


def _side_or_gap(feature: Feature) -> str:
    if feature.kind == "cooccurrence":
        return feature.side
    if feature.kind == "gapped_bigram":
        return str(feature.max_gap)
    return "-"


def serialize_feature_set(fs: FeatureSet) -> str:
    """Tab-separated text form: kind, words, side/gap, freq, g2."""
    lines = []
    for info in fs.selection:
        lines.append(
            "# selection"
            f"\tkind={info.kind}\tmin_freq={info.min_freq}"
            f"\tg2_min={'-' if info.g2_min is None else repr(info.g2_min)}"
            f"\tstoplist={info.stoplist_digest}\tmax_gap={info.max_gap}"
        )
    for feat, stat in zip(fs.features, fs.stats):
        lines.append(
            f"{feat.kind}\t{' '.join(feat.words)}\t{_side_or_gap(feat)}"
            f"\t{stat.freq}\t{stat.g2!r}"
        )
    return "\n".join(lines) + "\n"


def parse_feature_set(text: str) -> FeatureSet:
    """Inverse of serialize_feature_set."""
    features: list[Feature] = []
    stats: list[FeatureStat] = []
    selection: list[SelectionInfo] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("# selection"):
            fields = dict(part.split("=", 1) for part in line.split("\t")[1:])
            selection.append(
                SelectionInfo(
                    kind=fields["kind"],
                    min_freq=int(fields["min_freq"]),
                    g2_min=None if fields["g2_min"] == "-" else float(fields["g2_min"]),
                    stoplist_digest=fields["stoplist"],
                    max_gap=int(fields["max_gap"]),
                )
            )
            continue
        kind, words, side_or_gap, freq, g2 = line.split("\t")
        side = "none"
        max_gap = 0
        if kind == "cooccurrence":
            side = side_or_gap
        elif kind == "gapped_bigram":
            max_gap = int(side_or_gap)
        features.append(Feature(kind, tuple(words.split(" ")), side=side, max_gap=max_gap))
        stats.append(FeatureStat(freq=int(freq), g2=float(g2)))
    return FeatureSet(tuple(features), tuple(stats), tuple(selection))
