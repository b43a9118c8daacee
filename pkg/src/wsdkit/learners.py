"""Classifier induction over labeled binary feature vectors.

Every learner predicts a SenseDistribution, the universal output that
makes weighted voting possible: Naive Bayes (multivariate Bernoulli,
add-one smoothed), a C4.5-style decision tree (gain-ratio splits,
pessimistic-error pruning), a one-node decision stump, 1-nearest-neighbor
over Hamming distance, and the most-common-sense baseline.

The module-wide argmax tie rule is: highest score, then lexicographically
smallest sense label.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Mapping, Sequence

import numpy as np

from wsdkit.featurize import FeatureVector

MODEL_FORMAT = "wsdkit-model"
MODEL_VERSION = 1

# gains below this are treated as zero when picking splits
_GAIN_EPS = 1e-12


def argmax_sense(scores: Mapping[str, float]) -> str:
    """Module-wide tie rule: highest score, then smallest label."""
    if not scores:
        raise ValueError("cannot take argmax of an empty distribution")
    return min(scores, key=lambda s: (-scores[s], s))


@dataclass(frozen=True)
class SenseDistribution:
    """Non-negative per-sense scores; the universal classifier output."""

    scores: dict[str, float]

    def __post_init__(self):
        if not self.scores:
            raise ValueError("sense distribution needs at least one entry")
        for sense, value in self.scores.items():
            if value < 0 or not math.isfinite(value):
                raise ValueError(f"invalid score {value!r} for sense {sense!r}")

    def normalized(self) -> "SenseDistribution":
        total = sum(self.scores.values())
        if total <= 0:
            # no evidence either way: fall back to uniform
            uniform = 1.0 / len(self.scores)
            return SenseDistribution({s: uniform for s in self.scores})
        return SenseDistribution({s: v / total for s, v in self.scores.items()})

    def top(self) -> str:
        return argmax_sense(self.scores)


def _laplace_distribution(counts: Mapping[str, int], senses: Sequence[str]) -> SenseDistribution:
    """Add-one corrected class counts, so no sense ever has zero mass."""
    total = sum(counts.get(s, 0) for s in senses) + len(senses)
    return SenseDistribution({s: (counts.get(s, 0) + 1) / total for s in senses})


def _check_training(train: Sequence[FeatureVector]) -> tuple[str, ...]:
    if not train:
        raise ValueError("cannot train on an empty set of vectors")
    labels = set()
    for v in train:
        if v.label is None:
            raise ValueError(f"training vector {v.instance_id!r} has no label")
        labels.add(v.label)
    return tuple(sorted(labels))


def _as_matrix(train: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([v.bits for v in train], dtype=np.int8)


# ---------------------------------------------------------------------------
# Naive Bayes


@dataclass
class NaiveBayesModel:
    """Multivariate Bernoulli Naive Bayes with add-one smoothing.

    priors are (count(s)+1)/(N+|S|); conditionals P(bit=1|s) are
    (count(f=1,s)+1)/(count(s)+2), smoothed over the binary domain, so
    P(1|s) + P(0|s) = 1 for every feature and sense.
    """

    senses: tuple[str, ...]
    priors: np.ndarray  # (S,)
    p_one: np.ndarray  # (F, S)

    @property
    def n_features(self) -> int:
        return self.p_one.shape[0]

    def predict(self, v: FeatureVector) -> SenseDistribution:
        return nb_predict(self, v)


def train_naive_bayes(train: Sequence[FeatureVector]) -> NaiveBayesModel:
    senses = _check_training(train)
    X = _as_matrix(train)
    n, n_features = X.shape
    sense_index = {s: i for i, s in enumerate(senses)}
    y = np.array([sense_index[v.label] for v in train])

    class_counts = np.bincount(y, minlength=len(senses)).astype(float)
    priors = (class_counts + 1.0) / (n + len(senses))
    ones = np.zeros((n_features, len(senses)))
    for i in range(len(senses)):
        ones[:, i] = X[y == i].sum(axis=0)
    p_one = (ones + 1.0) / (class_counts + 2.0)
    return NaiveBayesModel(senses=senses, priors=priors, p_one=p_one)


def nb_predict(model: NaiveBayesModel, v: FeatureVector) -> SenseDistribution:
    """Posterior over senses given the full bit pattern.

    Both set and unset bits contribute. Computed in log space and
    renormalized, so the result sums to 1.
    """
    if len(v.bits) != model.n_features:
        raise ValueError(
            f"vector has {len(v.bits)} bits, model expects {model.n_features}"
        )
    bits = v.bits.astype(float)
    log_p1 = np.log(model.p_one)
    log_p0 = np.log(1.0 - model.p_one)
    logs = np.log(model.priors) + log_p0.sum(axis=0) + bits @ (log_p1 - log_p0)
    logs -= logs.max()
    weights = np.exp(logs)
    weights /= weights.sum()
    return SenseDistribution(dict(zip(model.senses, weights.tolist())))


# ---------------------------------------------------------------------------
# Decision tree


@dataclass
class TreeNode:
    counts: dict[str, int]
    feature: int | None = None  # None marks a leaf
    zero: "TreeNode | None" = None
    one: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.zero.depth(), self.one.depth())

    def n_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.zero.n_leaves() + self.one.n_leaves()


@dataclass(frozen=True)
class TreeConfig:
    confidence_factor: float = 0.25
    min_leaf: int = 2
    prune: bool = True


@dataclass
class DecisionTreeModel:
    root: TreeNode
    senses: tuple[str, ...]
    n_features: int
    config: TreeConfig = field(default_factory=TreeConfig)

    def predict(self, v: FeatureVector) -> SenseDistribution:
        return tree_predict(self, v)

    def depth(self) -> int:
        return self.root.depth()


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _row_entropy(counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    """Entropy of each row of a (F, S) count matrix, 0*log(0) = 0."""
    p = np.divide(
        counts,
        totals[:, None],
        out=np.zeros_like(counts, dtype=float),
        where=totals[:, None] > 0,
    )
    logp = np.log2(p, out=np.zeros_like(p), where=p > 0)
    return -(p * logp).sum(axis=1)


def _best_split(X: np.ndarray, y: np.ndarray, n_senses: int, usable: np.ndarray):
    """Gain-ratio split search over binary features.

    Considers usable features with a real two-way split and returns
    (feature index, gain ratio) for the highest ratio, ties going to the
    lowest feature index, or (None, 0.0) when no feature splits the node.
    Zero-gain splits are admissible: the grow phase must be able to
    characterize separable training data exactly, and a combination of
    individually uninformative features can still separate it.
    """
    n = len(y)
    total_counts = np.bincount(y, minlength=n_senses).astype(float)
    parent_entropy = _entropy(total_counts)

    onehot = np.zeros((n, n_senses))
    onehot[np.arange(n), y] = 1.0
    ones = X.astype(float).T @ onehot  # (F, S) class counts on the bit=1 branch
    zeros = total_counts[None, :] - ones

    n1 = ones.sum(axis=1)
    n0 = n - n1
    valid = usable & (n1 > 0) & (n0 > 0)
    if not valid.any():
        return None, 0.0

    info = (n0 * _row_entropy(zeros, n0) + n1 * _row_entropy(ones, n1)) / n
    gain = np.maximum(parent_entropy - info, 0.0)
    gain[gain <= _GAIN_EPS] = 0.0
    p1 = n1 / n
    split_info = _row_entropy(np.column_stack([n0, n1]), np.full_like(p1, float(n)))
    ratio = np.divide(gain, split_info, out=np.zeros_like(gain), where=split_info > 0)
    ratio[~valid] = -1.0
    best = int(np.argmax(ratio))  # argmax takes the lowest index on ties
    return best, float(ratio[best])


def _counts_dict(y: np.ndarray, senses: tuple[str, ...]) -> dict[str, int]:
    binc = np.bincount(y, minlength=len(senses))
    return {s: int(binc[i]) for i, s in enumerate(senses)}


def _grow(X, y, senses, usable, min_leaf) -> TreeNode:
    node = TreeNode(counts=_counts_dict(y, senses))
    if len(y) < min_leaf or len(np.unique(y)) == 1 or not usable.any():
        return node
    feature, _ = _best_split(X, y, len(senses), usable)
    if feature is None:
        return node
    mask = X[:, feature] == 1
    child_usable = usable.copy()
    child_usable[feature] = False  # a feature splits at most once per path
    node.feature = feature
    node.zero = _grow(X[~mask], y[~mask], senses, child_usable, min_leaf)
    node.one = _grow(X[mask], y[mask], senses, child_usable, min_leaf)
    return node


def _pessimistic_errors(counts: Mapping[str, int], z: float) -> float:
    """Upper-confidence-limit error count for a leaf holding ``counts``."""
    n = sum(counts.values())
    if n == 0:
        return 0.0
    errors = n - max(counts.values())
    f = errors / n
    z2 = z * z
    upper = (f + z2 / (2 * n) + z * math.sqrt(f * (1 - f) / n + z2 / (4 * n * n))) / (
        1 + z2 / n
    )
    return n * upper


def _prune(node: TreeNode, z: float) -> float:
    """Bottom-up pessimistic pruning; returns the node's estimated errors."""
    if node.is_leaf:
        return _pessimistic_errors(node.counts, z)
    subtree = _prune(node.zero, z) + _prune(node.one, z)
    collapsed = _pessimistic_errors(node.counts, z)
    if collapsed <= subtree:
        node.feature = None
        node.zero = None
        node.one = None
        return collapsed
    return subtree


def train_decision_tree(
    train: Sequence[FeatureVector], config: TreeConfig = TreeConfig()
) -> DecisionTreeModel:
    """Grow a tree that fits the training data, then prune it back.

    Splits are chosen by gain ratio; growth stops at purity, feature
    exhaustion, or nodes smaller than ``min_leaf``. Pruning collapses any
    subtree whose pessimistic error estimate (confidence factor 0.25) is
    not better than the collapsed leaf's.
    """
    senses = _check_training(train)
    X = _as_matrix(train)
    sense_index = {s: i for i, s in enumerate(senses)}
    y = np.array([sense_index[v.label] for v in train])
    usable = np.ones(X.shape[1], dtype=bool)
    root = _grow(X, y, senses, usable, config.min_leaf)
    if config.prune:
        z = NormalDist().inv_cdf(1.0 - config.confidence_factor)
        _prune(root, z)
    return DecisionTreeModel(root=root, senses=senses, n_features=X.shape[1], config=config)


def tree_predict(model: DecisionTreeModel, v: FeatureVector) -> SenseDistribution:
    """Walk to a leaf; the result is that leaf's Laplace-corrected counts."""
    if len(v.bits) != model.n_features:
        raise ValueError(
            f"vector has {len(v.bits)} bits, model expects {model.n_features}"
        )
    node = model.root
    while not node.is_leaf:
        node = node.one if v.bits[node.feature] else node.zero
    return _laplace_distribution(node.counts, model.senses)


# ---------------------------------------------------------------------------
# Decision stump


@dataclass
class DecisionStumpModel:
    """Depth-one tree: the root split only, or the bare majority class."""

    senses: tuple[str, ...]
    n_features: int
    feature: int | None
    zero_counts: dict[str, int]
    one_counts: dict[str, int]
    counts: dict[str, int]

    def predict(self, v: FeatureVector) -> SenseDistribution:
        return stump_predict(self, v)


def train_decision_stump(train: Sequence[FeatureVector]) -> DecisionStumpModel:
    """Stop tree learning once the root is selected.

    The root feature is exactly the one train_decision_tree would pick;
    each branch predicts its branch majority. With no informative feature
    the stump degenerates to the most common sense.
    """
    senses = _check_training(train)
    X = _as_matrix(train)
    sense_index = {s: i for i, s in enumerate(senses)}
    y = np.array([sense_index[v.label] for v in train])
    counts = _counts_dict(y, senses)
    feature = None
    if len(np.unique(y)) > 1:
        feature, ratio = _best_split(X, y, len(senses), np.ones(X.shape[1], dtype=bool))
        if ratio <= _GAIN_EPS:
            feature = None  # no positive gain ratio: fall back to the majority class
    if feature is None:
        return DecisionStumpModel(senses, X.shape[1], None, {}, {}, counts)
    mask = X[:, feature] == 1
    return DecisionStumpModel(
        senses=senses,
        n_features=X.shape[1],
        feature=feature,
        zero_counts=_counts_dict(y[~mask], senses),
        one_counts=_counts_dict(y[mask], senses),
        counts=counts,
    )


def stump_predict(model: DecisionStumpModel, v: FeatureVector) -> SenseDistribution:
    if len(v.bits) != model.n_features:
        raise ValueError(
            f"vector has {len(v.bits)} bits, model expects {model.n_features}"
        )
    if model.feature is None:
        counts = model.counts
    else:
        counts = model.one_counts if v.bits[model.feature] else model.zero_counts
    return _laplace_distribution(counts, model.senses)


# ---------------------------------------------------------------------------
# Nearest neighbor


@dataclass
class KnnModel:
    """Stored training vectors; votes of the k Hamming-nearest neighbors."""

    X: np.ndarray
    labels: tuple[str, ...]
    k: int = 1

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("cannot build a nearest-neighbor model with no vectors")
        if not 1 <= self.k <= len(self.labels):
            raise ValueError(f"k={self.k} out of range for {len(self.labels)} vectors")

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def predict(self, v: FeatureVector) -> SenseDistribution:
        return knn_predict(self, v)


def train_knn(train: Sequence[FeatureVector], k: int = 1) -> KnnModel:
    _check_training(train)
    return KnnModel(X=_as_matrix(train), labels=tuple(v.label for v in train), k=k)


def knn_predict(model: KnnModel, v: FeatureVector) -> SenseDistribution:
    """Vote fractions of the k nearest training vectors.

    Distance ties are broken by earliest training index.
    """
    if len(v.bits) != model.n_features:
        raise ValueError(
            f"vector has {len(v.bits)} bits, model expects {model.n_features}"
        )
    distances = np.abs(model.X - v.bits).sum(axis=1)
    order = np.argsort(distances, kind="stable")[: model.k]
    votes = Counter(model.labels[i] for i in order)
    return SenseDistribution({s: c / model.k for s, c in votes.items()})


# ---------------------------------------------------------------------------
# Baseline


@dataclass
class MajorityClassModel:
    """Constant predictor used as the degenerate fallback."""

    senses: tuple[str, ...]
    counts: dict[str, int]
    n_features: int = 0

    def predict(self, v: FeatureVector | None = None) -> SenseDistribution:
        total = sum(self.counts.values())
        return SenseDistribution({s: c / total for s, c in self.counts.items()})


def train_majority(train: Sequence[FeatureVector]) -> MajorityClassModel:
    senses = _check_training(train)
    counts = Counter(v.label for v in train)
    return MajorityClassModel(senses=senses, counts=dict(counts))


def majority_baseline(train: Sequence[FeatureVector]) -> SenseDistribution:
    """Training label frequencies; the most-common-sense baseline."""
    return train_majority(train).predict()


# ---------------------------------------------------------------------------
# Text serialization (versioned)


def _tree_to_obj(node: TreeNode):
    obj = {"counts": node.counts}
    if not node.is_leaf:
        obj["feature"] = node.feature
        obj["zero"] = _tree_to_obj(node.zero)
        obj["one"] = _tree_to_obj(node.one)
    return obj


def _tree_from_obj(obj) -> TreeNode:
    node = TreeNode(counts={str(k): int(v) for k, v in obj["counts"].items()})
    if "feature" in obj:
        node.feature = int(obj["feature"])
        node.zero = _tree_from_obj(obj["zero"])
        node.one = _tree_from_obj(obj["one"])
    return node


def serialize_model(model, feature_set_digest: str | None = None) -> str:
    """Versioned JSON text form of any trained model."""
    body: dict
    if isinstance(model, NaiveBayesModel):
        body = {
            "type": "naive_bayes",
            "senses": list(model.senses),
            "priors": model.priors.tolist(),
            "p_one": model.p_one.tolist(),
        }
    elif isinstance(model, DecisionTreeModel):
        body = {
            "type": "decision_tree",
            "senses": list(model.senses),
            "n_features": model.n_features,
            "confidence_factor": model.config.confidence_factor,
            "min_leaf": model.config.min_leaf,
            "root": _tree_to_obj(model.root),
        }
    elif isinstance(model, DecisionStumpModel):
        body = {
            "type": "decision_stump",
            "senses": list(model.senses),
            "n_features": model.n_features,
            "feature": model.feature,
            "zero_counts": model.zero_counts,
            "one_counts": model.one_counts,
            "counts": model.counts,
        }
    elif isinstance(model, KnnModel):
        body = {
            "type": "knn",
            "k": model.k,
            "labels": list(model.labels),
            "vectors": model.X.tolist(),
        }
    elif isinstance(model, MajorityClassModel):
        body = {
            "type": "majority",
            "senses": list(model.senses),
            "counts": model.counts,
            "n_features": model.n_features,
        }
    else:
        raise TypeError(f"cannot serialize model of type {type(model).__name__}")
    envelope = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "feature_set": feature_set_digest,
    }
    envelope.update(body)
    return json.dumps(envelope, ensure_ascii=False, indent=1) + "\n"


def deserialize_model(text: str):
    obj = json.loads(text)
    if obj.get("format") != MODEL_FORMAT:
        raise ValueError("not a serialized model")
    if obj.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {obj.get('version')!r}")
    kind = obj["type"]
    if kind == "naive_bayes":
        return NaiveBayesModel(
            senses=tuple(obj["senses"]),
            priors=np.array(obj["priors"], dtype=float),
            p_one=np.array(obj["p_one"], dtype=float),
        )
    if kind == "decision_tree":
        return DecisionTreeModel(
            root=_tree_from_obj(obj["root"]),
            senses=tuple(obj["senses"]),
            n_features=int(obj["n_features"]),
            config=TreeConfig(
                confidence_factor=float(obj["confidence_factor"]),
                min_leaf=int(obj["min_leaf"]),
            ),
        )
    if kind == "decision_stump":
        return DecisionStumpModel(
            senses=tuple(obj["senses"]),
            n_features=int(obj["n_features"]),
            feature=None if obj["feature"] is None else int(obj["feature"]),
            zero_counts={k: int(v) for k, v in obj["zero_counts"].items()},
            one_counts={k: int(v) for k, v in obj["one_counts"].items()},
            counts={k: int(v) for k, v in obj["counts"].items()},
        )
    if kind == "knn":
        return KnnModel(
            X=np.array(obj["vectors"], dtype=np.int8),
            labels=tuple(obj["labels"]),
            k=int(obj["k"]),
        )
    if kind == "majority":
        return MajorityClassModel(
            senses=tuple(obj["senses"]),
            counts={k: int(v) for k, v in obj["counts"].items()},
            n_features=int(obj["n_features"]),
        )
    raise ValueError(f"unknown model type {kind!r}")
