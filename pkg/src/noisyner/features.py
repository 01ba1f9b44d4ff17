"""
Per-token sparse feature extraction.

Feature names follow the template families token (w=), window unigrams
(w[k]=) and adjacent bigrams (w[k]|w[k+1]=), word shape (shape-,
shapeshort-), length-, pref=/suff=, pos=, Brown cluster prefixes
(p<d>x<bits>, prev_p<d>x<bits>), the scaled term frequency tf, and
gazetteer membership (in_gaz=<source>).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .corpus import Sentence
from .distrib import (DEFAULT_DEPTHS, ClusterModel, TermFrequencyModel, bit_prefix,
                      term_freq_feature_value)
from .gazetteer import GazetteerCatalog, match_tokens

BOS = "<s>"
EOS = "</s>"

_WS = re.compile(r"\s")


@dataclass
class FeatureConfig:
    window: tuple = (-2, 2)
    affix_lengths: tuple = (1, 2, 3)
    cluster_depths: tuple = DEFAULT_DEPTHS
    use_pos: bool = True
    old_epoch_weight: float = 0.7
    new_epochs: frozenset = frozenset()
    use_clusters: bool = True
    use_termfreq: bool = True
    use_gazetteers: bool = True

    def __post_init__(self):
        lo, hi = self.window
        if not lo <= 0 <= hi:
            raise ValueError("window {} must contain 0".format(self.window))
        if not 0 < self.old_epoch_weight <= 1:
            raise ValueError("old_epoch_weight must be in (0, 1]")
        self.window = (int(lo), int(hi))
        self.affix_lengths = tuple(sorted(set(self.affix_lengths)))
        self.cluster_depths = tuple(self.cluster_depths)
        self.new_epochs = frozenset(self.new_epochs)


@dataclass
class Resources:
    clusters: Optional[ClusterModel] = None
    termfreq: Optional[TermFrequencyModel] = None
    gazetteers: Optional[GazetteerCatalog] = None


def shape(word: str) -> str:
    out = []
    for ch in word:
        if ch.isupper():
            out.append("X")
        elif ch.islower():
            out.append("x")
        elif ch.isdigit():
            out.append("0")
        else:
            out.append(ch)
    return "".join(out)


def collapse_runs(s: str) -> str:
    return "".join(k for k, _ in itertools.groupby(s))


def shape_short(word: str) -> str:
    return collapse_runs(shape(word))


def _check_resources(resources, config):
    wanted = (("clusters", config.use_clusters), ("termfreq", config.use_termfreq),
              ("gazetteers", config.use_gazetteers))
    for name, enabled in wanted:
        if enabled and getattr(resources, name) is None:
            raise ValueError("feature resource '{}' is enabled but not loaded".format(name))


def extract(sentence: Sentence, resources: Resources, config: FeatureConfig = FeatureConfig()) -> list:
    """Feature vectors (dicts of name -> value), one per token."""
    _check_resources(resources, config)
    words = sentence.words
    n = len(words)
    if n == 0:
        raise ValueError("cannot extract features from an empty sentence")
    lo, hi = config.window

    def at(i):
        if i < 0:
            return BOS
        if i >= n:
            return EOS
        return words[i]

    paths = [None] * n
    if config.use_clusters:
        paths = [resources.clusters.paths.get(w) for w in words]
    gaz = match_tokens(resources.gazetteers, words) if config.use_gazetteers else [()] * n

    vectors = []
    for i, word in enumerate(words):
        f = {"w=" + word: 1.0}
        for k in range(lo, hi + 1):
            if k:
                f["w[{}]={}".format(k, at(i + k))] = 1.0
        for k in range(lo, hi):
            f["w[{}]|w[{}]={}|{}".format(k, k + 1, at(i + k), at(i + k + 1))] = 1.0
        f["shape-" + shape(word)] = 1.0
        f["shapeshort-" + shape_short(word)] = 1.0
        f["length-{}".format(len(word))] = 1.0
        for a in config.affix_lengths:
            if a <= len(word):
                f["pref=" + word[:a]] = 1.0
                f["suff=" + word[-a:]] = 1.0
        pos = sentence.tokens[i].pos
        if config.use_pos and pos is not None:
            f["pos=" + pos] = 1.0
        if paths[i]:
            for d in config.cluster_depths:
                f["p{}x{}".format(d, bit_prefix(paths[i], d))] = 1.0
        if i > 0 and paths[i - 1]:
            for d in config.cluster_depths:
                f["prev_p{}x{}".format(d, bit_prefix(paths[i - 1], d))] = 1.0
        if config.use_termfreq:
            tf = term_freq_feature_value(resources.termfreq, word)
            if tf is not None:
                f["tf"] = tf
        for name in gaz[i]:
            f[name] = 1.0
        vectors.append({_WS.sub("_", k): v for k, v in f.items()})
    return vectors


def epoch_factor(sentence: Sentence, config: FeatureConfig) -> float:
    """Scale applied to a training sentence's feature values.

    Sentences with no epoch tag are not treated as old.
    """
    factor = sentence.weight
    if sentence.epoch is not None and sentence.epoch not in config.new_epochs:
        factor *= config.old_epoch_weight
    return factor


def apply_epoch_weight(vectors: Sequence[dict], sentence: Sentence,
                       config: FeatureConfig = FeatureConfig()) -> list:
    factor = epoch_factor(sentence, config)
    if factor == 1.0:
        return [dict(v) for v in vectors]
    return [{k: val * factor for k, val in v.items()} for v in vectors]


def write_feature_dump(sentence: Sentence, vectors: Sequence[dict], stream: TextIO) -> None:
    """Debug dump: `token<TAB>label<TAB>name=value ...` per token, blank line after."""
    labels = sentence.labels or ["_"] * len(sentence)
    for tok, label, vec in zip(sentence.tokens, labels, vectors):
        feats = " ".join("{}={!r}".format(k, v) for k, v in vec.items())
        stream.write("{}\t{}\t{}\n".format(tok.text, label, feats))
    stream.write("\n")
