"""Lexical-sample word sense disambiguation toolkit.

Per-word supervised disambiguation from simple lexical features: unigram,
bigram, gapped-bigram and head-adjacent co-occurrence features selected by
frequency and log-likelihood significance, fed to Naive Bayes, decision
tree, stump and nearest-neighbor learners, combined by bagging and voting.
"""

from wsdkit.corpus import (
    Instance,
    LexeltDataset,
    TokenizerConfig,
    read_canonical,
    read_canonical_all,
    read_senseval_xml,
    read_senseval_xml_all,
    tokenize,
    write_canonical,
)
from wsdkit.stoplist import StopList, build_stoplist, is_stopped
from wsdkit.ngram_stats import (
    ContingencyTable,
    Feature,
    FeatureSet,
    count_bigrams,
    count_unigrams,
    extract_cooccurrences,
    g_squared,
    select_features,
)
from wsdkit.featurize import FeatureVector, featurize, featurize_dataset
from wsdkit.learners import (
    SenseDistribution,
    majority_baseline,
    train_decision_stump,
    train_decision_tree,
    train_naive_bayes,
)
from wsdkit.ensemble import bag, bootstrap_sample, majority_vote, weighted_vote
from wsdkit.systems import AnswerSet, SystemConfig, build_system, run_system
from wsdkit.evaluation import KeySet, agreement, score, write_answers

__version__ = "0.1.0"
