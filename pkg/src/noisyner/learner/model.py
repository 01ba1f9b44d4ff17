"""Sequence model parameters, feature encoding, persistence and weight inspection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from ..corpus import LabelScheme, split_label

MODEL_VERSION = 1
LEARNERS = ("crf-lbfgs", "crf-pa", "perceptron")
START = "<START>"
EMISSION_SEP = "∧"    # obs-feature ∧ label
ARROW = "→"           # T:prev → cur


class ModelFormatError(ValueError):
    pass


@dataclass
class LearnerConfig:
    l2_sigma2: float = 10.0
    lbfgs_memory: int = 10
    max_iterations: int = 200
    grad_tolerance: float = 1e-5
    pa_C: float = 1.0
    epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("l2_sigma2", "lbfgs_memory", "max_iterations", "grad_tolerance",
                     "pa_C", "epochs"):
            if not getattr(self, name) > 0:
                raise ValueError("{} must be positive".format(name))


@dataclass
class SequenceModel:
    scheme: LabelScheme
    features: list
    emission: np.ndarray        # len(features) x len(labels)
    transition: np.ndarray      # prev x cur
    start: np.ndarray
    learner_tag: str
    version: int = MODEL_VERSION
    meta: dict = field(default_factory=dict)
    history: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        L = len(self.scheme.labels)
        self.emission = np.asarray(self.emission, dtype=float).reshape(len(self.features), L)
        self.transition = np.asarray(self.transition, dtype=float).reshape(L, L)
        self.start = np.asarray(self.start, dtype=float).reshape(L)
        if self.learner_tag not in LEARNERS:
            raise ValueError("unknown learner tag {!r}".format(self.learner_tag))
        self.index = {f: i for i, f in enumerate(self.features)}
        if len(self.index) != len(self.features):
            raise ValueError("duplicate observation features in model")

    @classmethod
    def zeros(cls, scheme, features, learner_tag):
        L = len(scheme.labels)
        return cls(scheme, list(features), np.zeros((len(features), L)), np.zeros((L, L)),
                   np.zeros(L), learner_tag)

    @classmethod
    def from_weights(cls, scheme, weights, learner_tag="crf-lbfgs"):
        """Build a model from `obs∧label` / `T:prev→cur` named weights."""
        labels = scheme.labels
        features, rows = [], {}
        emission, trans, start = [], np.zeros((len(labels),) * 2), np.zeros(len(labels))
        for name, w in weights.items():
            if name.startswith("T:"):
                prev, _, cur = name[2:].partition(ARROW)
                if prev == START:
                    start[labels.index(cur)] = w
                else:
                    trans[labels.index(prev), labels.index(cur)] = w
                continue
            obs, _, label = name.rpartition(EMISSION_SEP)
            if obs not in rows:
                rows[obs] = len(features)
                features.append(obs)
                emission.append(np.zeros(len(labels)))
            emission[rows[obs]][labels.index(label)] = w
        E = np.array(emission) if emission else np.zeros((0, len(labels)))
        return cls(scheme, features, E, trans, start, learner_tag)

    @property
    def labels(self):
        return self.scheme.labels

    @property
    def weights(self):
        """All non-zero weights under their `obs∧label` / `T:prev→cur` names."""
        out = {}
        labels = self.labels
        for f, row in zip(self.features, self.emission):
            for j in np.flatnonzero(row):
                out[f + EMISSION_SEP + labels[j]] = float(row[j])
        for j in np.flatnonzero(self.start):
            out["T:" + START + ARROW + labels[j]] = float(self.start[j])
        for i, j in zip(*np.nonzero(self.transition)):
            out["T:" + labels[i] + ARROW + labels[j]] = float(self.transition[i, j])
        return out

    def encode(self, vectors):
        return encode(vectors, self.index)

    def emission_scores(self, vectors):
        return np.asarray(self.encode(vectors) @ self.emission)

    def label_indices(self, labels):
        try:
            return [self.scheme.labels.index(y) for y in labels]
        except ValueError:
            bad = [y for y in labels if y not in self.scheme.labels]
            raise ValueError("label(s) outside the model's scheme: {}".format(bad)) from None


def encode(vectors: Sequence[dict], index: dict) -> sp.csr_matrix:
    """Sparse T x F matrix of feature values; features missing from `index` are dropped."""
    data, cols, indptr = [], [], [0]
    for vec in vectors:
        for name, value in vec.items():
            j = index.get(name)
            if j is not None and value != 0:
                cols.append(j)
                data.append(value)
        indptr.append(len(cols))
    return sp.csr_matrix((np.array(data, dtype=float), np.array(cols, dtype=np.int64),
                          np.array(indptr, dtype=np.int64)), shape=(len(vectors), len(index)))


def build_index(instances) -> dict:
    """Observation alphabet in first-seen order over (vectors, labels) instances."""
    index = {}
    for vectors, _ in instances:
        for vec in vectors:
            for name in vec:
                if name not in index:
                    index[name] = len(index)
    return index


def save_model(model: SequenceModel, stream: TextIO) -> None:
    for t in model.scheme.types:
        if "," in t or any(c.isspace() for c in t):
            raise ModelFormatError("entity type {!r} cannot be serialized".format(t))
    stream.write("#version={}\n".format(model.version))
    stream.write("#learner={}\n".format(model.learner_tag))
    stream.write("#types={}\n".format(",".join(model.scheme.types)))
    for k in sorted(model.meta):
        stream.write("#meta.{}={}\n".format(k, model.meta[k]))
    labels = model.labels
    fmt = "{}\t{}\t{:.17g}\n"
    for f, row in zip(model.features, model.emission):
        for j in np.flatnonzero(row):
            stream.write(fmt.format(f, labels[j], row[j]))
    for j in np.flatnonzero(model.start):
        stream.write(fmt.format("T:" + START, labels[j], model.start[j]))
    for i, j in zip(*np.nonzero(model.transition)):
        stream.write(fmt.format("T:" + labels[i], labels[j], model.transition[i, j]))


def load_model(stream: TextIO) -> SequenceModel:
    header = {}
    meta = {}
    rows = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        if line.startswith("#") and not rows:
            key, sep, value = line[1:].partition("=")
            if not sep:
                raise ModelFormatError("line {}: malformed header {!r}".format(lineno, line))
            if key.startswith("meta."):
                meta[key[5:]] = value
            else:
                header[key] = value
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ModelFormatError("line {}: expected feature<TAB>label<TAB>weight".format(lineno))
        try:
            w = float(cols[2])
        except ValueError:
            raise ModelFormatError("line {}: bad weight {!r}".format(lineno, cols[2])) from None
        if not math.isfinite(w):
            raise ModelFormatError("line {}: non-finite weight".format(lineno))
        rows.append((lineno, cols[0], cols[1], w))

    try:
        version = int(header["version"])
    except (KeyError, ValueError):
        raise ModelFormatError("missing or malformed #version header") from None
    if version != MODEL_VERSION:
        raise ModelFormatError("model format version {} is not supported (expected {})"
                               .format(version, MODEL_VERSION))
    if "learner" not in header or "types" not in header:
        raise ModelFormatError("missing #learner or #types header")
    scheme = LabelScheme(tuple(header["types"].split(",")))
    labels = scheme.labels
    L = len(labels)
    features, feat_row, emission = [], {}, []
    trans, start = np.zeros((L, L)), np.zeros(L)
    for lineno, f, label, w in rows:
        if label not in labels:
            raise ModelFormatError("line {}: label {!r} not in scheme".format(lineno, label))
        j = labels.index(label)
        if f.startswith("T:"):
            prev = f[2:]
            if prev == START:
                start[j] = w
            elif prev in labels:
                trans[labels.index(prev), j] = w
            else:
                raise ModelFormatError("line {}: unknown transition source {!r}".format(lineno, prev))
            continue
        if f not in feat_row:
            feat_row[f] = len(features)
            features.append(f)
            emission.append(np.zeros(L))
        emission[feat_row[f]][j] = w
    E = np.array(emission) if emission else np.zeros((0, L))
    return SequenceModel(scheme, features, E, trans, start, header["learner"], version, meta)


def inspect_top_features(model: SequenceModel, k: int, name_filter=None) -> list:
    """
    Largest-magnitude emission weights as (feature, label, weight), descending.

    name_filter is a prefix or a sequence of prefixes on the observation name.
    """
    if k <= 0:
        return []
    if isinstance(name_filter, str):
        name_filter = (name_filter,)
    prefixes = tuple(name_filter) if name_filter else None
    rows = []
    labels = model.labels
    for f, row in zip(model.features, model.emission):
        if prefixes and not f.startswith(prefixes):
            continue
        for j in np.flatnonzero(row):
            rows.append((f, labels[j], float(row[j])))
    rows.sort(key=lambda r: (-abs(r[2]), r[0], r[1]))
    return rows[:k]


def format_top_features(rows) -> str:
    return "".join("{}\t{}\t{:.6f}\n".format(f, label, w) for f, label, w in rows)


def bio_allowed(scheme: LabelScheme):
    """Boolean (trans, start) masks of the BIO-legal transitions."""
    labels = scheme.labels
    L = len(labels)
    trans = np.ones((L, L), dtype=bool)
    start = np.ones(L, dtype=bool)
    for j, cur in enumerate(labels):
        prefix, etype = split_label(cur)
        if prefix != "I":
            continue
        start[j] = False
        for i, prev in enumerate(labels):
            trans[i, j] = split_label(prev)[1] == etype
    return trans, start
