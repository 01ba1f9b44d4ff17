"""Model-level scoring, marginal inference and decoding over feature vectors."""
from __future__ import annotations

import numpy as np

from . import lattice
from .model import SequenceModel, bio_allowed


def _scores(model: SequenceModel, vectors):
    if len(vectors) == 0:
        raise ValueError("empty sequence")
    E = model.emission_scores(vectors)
    lattice._check_finite(E, model.transition, model.start)
    return E


def score_sequence(model: SequenceModel, vectors, labels) -> float:
    if len(vectors) != len(labels):
        raise ValueError("{} labels for {} positions".format(len(labels), len(vectors)))
    y = model.label_indices(labels)
    return lattice.path_score(_scores(model, vectors), model.transition, model.start, y)


def forward_backward(model: SequenceModel, vectors) -> lattice.LatticeScores:
    return lattice.forward_backward(_scores(model, vectors), model.transition, model.start)


def constrained_scores(model: SequenceModel):
    """Transition and start scores with BIO-illegal moves set to -inf."""
    allowed_t, allowed_s = bio_allowed(model.scheme)
    return (np.where(allowed_t, model.transition, -np.inf),
            np.where(allowed_s, model.start, -np.inf))


def viterbi(model: SequenceModel, vectors, constrain_bio=False) -> list:
    E = _scores(model, vectors)
    trans, start = constrained_scores(model) if constrain_bio else (model.transition, model.start)
    return [model.labels[i] for i in lattice.viterbi(E, trans, start)]
