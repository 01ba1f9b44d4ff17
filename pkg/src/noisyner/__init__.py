"""Named entity recognition for noisy short text.

Brown-cluster, gazetteer and morpho-syntactic features feeding a linear-chain
CRF (L-BFGS), a passive-aggressive learner or an averaged perceptron, with
drift-compensating down-weighting of older training data.
"""
from .corpus import (BIOError, CorpusError, LabelScheme, Sentence, Token, read_conll,
                     repair_bio, write_conll)
from .distrib import (ClusterConfig, ClusterModel, TermFrequencyModel, bit_prefix,
                      build_term_freq, lookup_path, term_freq_feature_value, train_brown)
from .evaluate import EntitySpan, EvalReport, score, spans_from_bio
from .features import FeatureConfig, Resources, apply_epoch_weight, extract, shape, shape_short
from .gazetteer import GazetteerCatalog, GazetteerEntry, load_gazetteer, match_tokens

__version__ = "0.1.0"

__all__ = [
    "BIOError", "ClusterConfig", "ClusterModel", "CorpusError", "EntitySpan", "EvalReport",
    "FeatureConfig", "GazetteerCatalog", "GazetteerEntry", "LabelScheme", "Resources",
    "Sentence", "TermFrequencyModel", "Token", "apply_epoch_weight", "bit_prefix",
    "build_term_freq", "extract", "load_gazetteer", "lookup_path", "match_tokens",
    "read_conll", "repair_bio", "score", "shape", "shape_short", "spans_from_bio",
    "term_freq_feature_value", "train_brown", "write_conll",
]
