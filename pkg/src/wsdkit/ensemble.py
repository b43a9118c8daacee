"""Bagging and vote combination shared by the composite systems.

Randomness flows from a single integer seed through splittable
per-replicate streams of a portable 64-bit generator (numpy PCG64 with
SeedSequence spawn keys), so every draw is reproducible across platforms.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from wsdkit.featurize import FeatureVector
from wsdkit.learners import SenseDistribution, argmax_sense

GENERATOR_NAME = "pcg64"

DEFAULT_REPLICATES = 10


def bootstrap_sample(n: int, seed: int, replicate: int) -> list[int]:
    """Draw n indices uniformly with replacement from [0, n).

    Fully determined by (seed, replicate): each replicate gets its own
    spawned stream of the generator.
    """
    if n < 1:
        raise ValueError("cannot bootstrap an empty training set")
    ss = np.random.SeedSequence(seed, spawn_key=(replicate,))
    rng = np.random.Generator(np.random.PCG64(ss))
    return rng.integers(0, n, size=n).tolist()


@dataclass
class BaggedEnsemble:
    """Homogeneous models trained on bootstrap replicates.

    Prediction is a weighted vote of the members.
    """

    members: tuple
    seed: int
    replicate_count: int

    def predict(self, v: FeatureVector) -> SenseDistribution:
        return weighted_vote([m.predict(v) for m in self.members])


def bag(
    train_fn: Callable[[Sequence[FeatureVector]], object],
    data: Sequence[FeatureVector],
    seed: int,
    replicates: int = DEFAULT_REPLICATES,
) -> BaggedEnsemble:
    """Train ``replicates`` members, one per bootstrap replicate.

    Replicate size equals the training-set size.
    """
    if not data:
        raise ValueError("cannot bag an empty training set")
    if replicates < 1:
        raise ValueError("need at least one replicate")
    members = []
    for r in range(replicates):
        indices = bootstrap_sample(len(data), seed, r)
        members.append(train_fn([data[i] for i in indices]))
    return BaggedEnsemble(members=tuple(members), seed=seed, replicate_count=replicates)


def weighted_vote(dists: Sequence[SenseDistribution]) -> SenseDistribution:
    """Sum normalized member distributions and renormalize.

    Senses absent from a member contribute nothing from it; the order of
    members does not matter.
    """
    if not dists:
        raise ValueError("weighted vote needs at least one distribution")
    sums: defaultdict[str, float] = defaultdict(float)
    for dist in dists:
        for sense, value in dist.normalized().scores.items():
            sums[sense] += value
    return SenseDistribution(dict(sums)).normalized()


def majority_vote(
    labels: Sequence[str], dists: Sequence[SenseDistribution] | None = None
) -> str:
    """Most frequent member label.

    Frequency ties are broken by the summed member distributions when
    given, then by the lexicographically smallest label.
    """
    if not labels:
        raise ValueError("majority vote needs at least one label")
    counts = Counter(labels)
    top = max(counts.values())
    tied = sorted(label for label, c in counts.items() if c == top)
    if len(tied) == 1 or dists is None:
        return tied[0]
    summed = weighted_vote(dists)
    return argmax_sense({label: summed.scores.get(label, 0.0) for label in tied})


@dataclass
class VotingEnsemble:
    """Heterogeneous predictors combined by weighted or majority vote."""

    members: tuple
    mode: str = "weighted"

    def __post_init__(self):
        if not self.members:
            raise ValueError("voting ensemble needs at least one member")
        if self.mode not in ("weighted", "majority"):
            raise ValueError(f"unknown vote mode {self.mode!r}")

    def decide(self, v: FeatureVector) -> tuple[str, SenseDistribution]:
        """Winning sense plus the summed member distribution.

        Under majority voting the winner can differ from the summed
        distribution's argmax; it always lies in its support.
        """
        dists = [m.predict(v) for m in self.members]
        summed = weighted_vote(dists)
        if self.mode == "weighted":
            return summed.top(), summed
        return majority_vote([d.top() for d in dists], dists), summed

    def predict(self, v: FeatureVector) -> SenseDistribution:
        return self.decide(v)[1]
