"""Glue between corpora, resources, feature extraction and the learners."""
from __future__ import annotations

import os

from .corpus import Sentence, repair_bio, split_label
from .distrib import read_paths, read_term_freq
from .evaluate import NOTYPES_TYPE
from .features import FeatureConfig, Resources, apply_epoch_weight, extract
from .gazetteer import load_manifest
from .learner import viterbi


def load_resources(clusters=None, termfreq=None, gazetteers=None) -> Resources:
    res = Resources()
    if clusters:
        with open(clusters, encoding="utf-8") as f:
            res.clusters = read_paths(f)
    if termfreq:
        with open(termfreq, encoding="utf-8") as f:
            res.termfreq = read_term_freq(f)
    if gazetteers:
        res.gazetteers = load_manifest(gazetteers)
    return res


def config_for(resources: Resources, **kwargs) -> FeatureConfig:
    """FeatureConfig with every missing resource switched off."""
    return FeatureConfig(use_clusters=resources.clusters is not None,
                         use_termfreq=resources.termfreq is not None,
                         use_gazetteers=resources.gazetteers is not None, **kwargs)


def _csv(values):
    return ",".join(str(v) for v in values)


def feature_meta(config: FeatureConfig, resource_paths: dict) -> dict:
    """Everything needed to re-extract identical features at tagging time."""
    meta = {
        "feature.window": _csv(config.window),
        "feature.affix_lengths": _csv(config.affix_lengths),
        "feature.cluster_depths": _csv(config.cluster_depths),
        "feature.use_pos": str(int(config.use_pos)),
        "feature.old_epoch_weight": repr(config.old_epoch_weight),
        "feature.new_epochs": _csv(sorted(config.new_epochs)),
    }
    for name in ("clusters", "termfreq", "gazetteers"):
        path = resource_paths.get(name)
        meta["resource." + name] = os.path.abspath(path) if path else ""
    return meta


def config_from_meta(meta: dict) -> FeatureConfig:
    ints = lambda key, default: tuple(int(v) for v in meta.get(key, default).split(",") if v)
    return FeatureConfig(
        window=ints("feature.window", "-2,2"),
        affix_lengths=ints("feature.affix_lengths", "1,2,3"),
        cluster_depths=ints("feature.cluster_depths", _csv(FeatureConfig().cluster_depths)),
        use_pos=meta.get("feature.use_pos", "1") == "1",
        old_epoch_weight=float(meta.get("feature.old_epoch_weight", "0.7")),
        new_epochs=frozenset(e for e in meta.get("feature.new_epochs", "").split(",") if e),
        use_clusters=bool(meta.get("resource.clusters")),
        use_termfreq=bool(meta.get("resource.termfreq")),
        use_gazetteers=bool(meta.get("resource.gazetteers")),
    )


def training_instances(sentences, resources: Resources, config: FeatureConfig) -> list:
    """(feature vectors, labels) per sentence, with epoch down-weighting applied."""
    out = []
    for sent in sentences:
        if sent.labels is None:
            raise ValueError("training sentence without labels")
        vectors = apply_epoch_weight(extract(sent, resources, config), sent, config)
        out.append((vectors, list(sent.labels)))
    return out


def collapse_types(sentences, name=NOTYPES_TYPE) -> list:
    """Copies of labeled sentences with every entity type renamed to `name`."""
    out = []
    for s in sentences:
        labels = [l if l == "O" else split_label(l)[0] + "-" + name for l in s.labels]
        out.append(Sentence(s.tokens, labels, s.weight, s.epoch))
    return out


def tag_sentences(model, sentences, resources: Resources, config: FeatureConfig,
                  constrain_bio=False) -> list:
    """Label each sentence; output is valid BIO either by constraint or by repair."""
    out = []
    for s in sentences:
        labels = viterbi(model, extract(s, resources, config), constrain_bio=constrain_bio)
        if not constrain_bio:
            labels = repair_bio(labels)
        out.append(Sentence(s.tokens, labels, s.weight, s.epoch))
    return out
