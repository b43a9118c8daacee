"""Binary feature-vector representation of instances.

Each selected feature is a presence bit: a unigram matches anywhere in the
context, a (gapped) bigram matches as an ordered pair within its gap limit,
and a co-occurrence matches the named immediate neighbor of the head.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wsdkit.corpus import Instance, LexeltDataset
from wsdkit.ngram_stats import FeatureSet


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length 0/1 vector over a feature set's ordering.

    ``label`` is the training sense (None for test vectors).
    """

    bits: np.ndarray
    label: str | None
    instance_id: str

    def __len__(self) -> int:
        return len(self.bits)


def _pair_gaps(tokens, max_gap: int) -> dict[tuple[str, str], int]:
    """Minimum intervening-token count for every ordered pair within max_gap."""
    gaps: dict[tuple[str, str], int] = {}
    n = len(tokens)
    for i in range(n):
        for j in range(i + 1, min(i + 2 + max_gap, n)):
            pair = (tokens[i], tokens[j])
            gap = j - i - 1
            if gaps.get(pair, 3) > gap:
                gaps[pair] = gap
    return gaps


def featurize(inst: Instance, fs: FeatureSet, label: str | None = None) -> FeatureVector:
    """Convert one instance into a binary vector over ``fs``.

    Bit i is 1 iff feature i matches the instance. The label defaults to
    the instance's primary gold sense when it has one.
    """
    tokens = inst.tokens
    unigrams = set(tokens)
    pair_gaps = _pair_gaps(tokens, fs.max_gap)
    ti = inst.target_index
    left = tokens[ti - 1] if ti > 0 else None
    right = tokens[ti + 1] if ti < len(tokens) - 1 else None

    bits = np.zeros(len(fs), dtype=np.int8)
    for i, feat in enumerate(fs.features):
        if feat.kind == "unigram":
            hit = feat.words[0] in unigrams
        elif feat.kind == "cooccurrence":
            word = feat.words[0]
            hit = (feat.side == "left" and left == word) or (
                feat.side == "right" and right == word
            )
        else:  # bigram / gapped_bigram
            gap = pair_gaps.get(feat.words)
            hit = gap is not None and gap <= feat.max_gap
        if hit:
            bits[i] = 1
    if label is None and inst.gold_senses:
        label = inst.gold_senses[0]
    return FeatureVector(bits=bits, label=label, instance_id=inst.instance_id)


def featurize_dataset(
    ds: LexeltDataset, fs: FeatureSet
) -> tuple[list[FeatureVector], list[FeatureVector]]:
    """Vectorize a dataset, order-preserving; test vectors carry no label."""
    train = [featurize(inst, fs) for inst in ds.train]
    test = [
        FeatureVector(
            bits=featurize(inst, fs).bits, label=None, instance_id=inst.instance_id
        )
        for inst in ds.test
    ]
    return train, test


def dump_arff(vectors, fs: FeatureSet, relation: str = "instances") -> str:
    """ARFF-style text dump of vectors for debugging."""
    labels = sorted({v.label for v in vectors if v.label is not None})
    lines = [f"@relation {relation}", ""]
    for feat in fs.features:
        name = f"{feat.kind}:{'_'.join(feat.words)}"
        if feat.kind == "cooccurrence":
            name += f":{feat.side}"
        elif feat.kind == "gapped_bigram":
            name += f":g{feat.max_gap}"
        lines.append(f"@attribute {name} {{0,1}}")
    lines.append(f"@attribute sense {{{','.join(labels) if labels else '?'}}}")
    lines.append("")
    lines.append("@data")
    for v in vectors:
        row = ",".join(str(int(b)) for b in v.bits)
        lines.append(f"{row},{v.label if v.label is not None else '?'}")
    return "\n".join(lines) + "\n"
