"""Online structured learners: passive-aggressive (PA-I) and averaged perceptron."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass

import numpy as np

from .lattice import path_score, viterbi
from .model import LearnerConfig, SequenceModel, build_index, encode

logger = logging.getLogger(__name__)


@dataclass
class Instance:
    cols: np.ndarray    # observation features active anywhere in the sequence
    X: np.ndarray       # T x len(cols), dense over the active features
    y: np.ndarray


def compile_online(instances, scheme, index=None):
    if index is None:
        index = build_index(instances)
    labels = scheme.labels
    out = []
    for vectors, y in instances:
        if y is None:
            raise ValueError("training instance is unlabeled")
        if len(y) != len(vectors) or not len(y):
            raise ValueError("instance has {} labels for {} positions".format(len(y), len(vectors)))
        M = encode(vectors, index).tocsc()
        cols = np.flatnonzero(np.diff(M.indptr))
        out.append(Instance(cols, M[:, cols].toarray(), np.array([labels.index(l) for l in y])))
    return out, index


class ChainWeights:
    """Dense emission/transition/start weights with sparse per-instance updates."""

    def __init__(self, n_features, n_labels):
        self.L = n_labels
        self.W = np.zeros((n_features, n_labels))
        self.trans = np.zeros((n_labels, n_labels))
        self.start = np.zeros(n_labels)

    def emissions(self, inst):
        return inst.X @ self.W[inst.cols]

    def score(self, inst, y):
        return path_score(self.emissions(inst), self.trans, self.start, y)

    def phi_diff(self, inst, y, yhat):
        """Phi(y) - Phi(yhat) as (emission rows for inst.cols, transition, start)."""
        eye = np.eye(self.L)
        d_em = inst.X.T @ (eye[y] - eye[yhat])
        d_tr = np.zeros((self.L, self.L))
        np.add.at(d_tr, (y[:-1], y[1:]), 1.0)
        np.add.at(d_tr, (yhat[:-1], yhat[1:]), -1.0)
        d_st = eye[y[0]] - eye[yhat[0]]
        return d_em, d_tr, d_st

    def add(self, inst, diff, scale):
        d_em, d_tr, d_st = diff
        self.W[inst.cols] += scale * d_em
        self.trans += scale * d_tr
        self.start += scale * d_st

    def copy_arrays(self):
        return self.W.copy(), self.trans.copy(), self.start.copy()


def sq_norm(diff):
    return float(sum((d ** 2).sum() for d in diff))


def hamming(y, yhat):
    return int(np.sum(np.asarray(y) != np.asarray(yhat)))


def cost_augmented_decode(weights: ChainWeights, inst):
    """argmax of score + Hamming cost: every wrong label's emission gets +1."""
    E = weights.emissions(inst) + 1.0
    E[np.arange(len(inst.y)), inst.y] -= 1.0
    return np.array(viterbi(E, weights.trans, weights.start))


def pa_step(weights: ChainWeights, inst, C):
    """
    One PA-I step. Returns (tau, yhat, loss); tau is 0.0 when no update was made.
    """
    yhat = cost_augmented_decode(weights, inst)
    loss = weights.score(inst, yhat) - weights.score(inst, inst.y) + hamming(inst.y, yhat)
    if loss <= 0 or np.array_equal(yhat, inst.y):
        return 0.0, yhat, loss
    diff = weights.phi_diff(inst, inst.y, yhat)
    norm = sq_norm(diff)
    if norm == 0.0:
        logger.warning("zero-norm feature difference with positive loss; skipping instance")
        return 0.0, yhat, loss
    tau = min(C, loss / norm)
    weights.add(inst, diff, tau)
    return tau, yhat, loss


def _model(scheme, index, arrays, tag):
    W, trans, start = arrays
    return SequenceModel(scheme, list(index), W, trans, start, tag)


def train_pa(instances, scheme, config: LearnerConfig = LearnerConfig()) -> SequenceModel:
    """Structured PA-I with Hamming cost; returns the average of end-of-epoch weights."""
    data, index = compile_online(instances, scheme)
    weights = ChainWeights(len(index), len(scheme.labels))
    rng = random.Random(config.seed)
    order = list(range(len(data)))
    sums = [np.zeros_like(a) for a in weights.copy_arrays()]
    taus, updates = [], []
    for epoch in range(config.epochs):
        rng.shuffle(order)
        n_up = 0
        for i in order:
            tau, _, _ = pa_step(weights, data[i], config.pa_C)
            if tau > 0:
                taus.append(tau)
                n_up += 1
        updates.append(n_up)
        for s, a in zip(sums, weights.copy_arrays()):
            s += a
        logger.info("PA epoch %d: %d updates", epoch + 1, n_up)
    model = _model(scheme, index, [s / config.epochs for s in sums], "crf-pa")
    model.history = {"taus": taus, "updates": updates}
    return model


def train_perceptron(instances, scheme, config: LearnerConfig = LearnerConfig()) -> SequenceModel:
    """
    Structured perceptron. The returned weights are the mean of the weight
    vectors held after each instance visit, computed lazily.
    """
    data, index = compile_online(instances, scheme)
    weights = ChainWeights(len(index), len(scheme.labels))
    lagged = ChainWeights(len(index), len(scheme.labels))   # sum of (step - 1) * update
    rng = random.Random(config.seed)
    order = list(range(len(data)))
    step = 0
    mistakes = []
    for epoch in range(config.epochs):
        rng.shuffle(order)
        wrong = 0
        for i in order:
            step += 1
            inst = data[i]
            yhat = np.array(viterbi(weights.emissions(inst), weights.trans, weights.start))
            if not np.array_equal(yhat, inst.y):
                wrong += 1
                diff = weights.phi_diff(inst, inst.y, yhat)
                weights.add(inst, diff, 1.0)
                lagged.add(inst, diff, float(step - 1))
        mistakes.append(wrong)
        logger.info("perceptron epoch %d: %d mistakes", epoch + 1, wrong)
    avg = [w - u / step for w, u in zip(weights.copy_arrays(), lagged.copy_arrays())]
    model = _model(scheme, index, avg, "perceptron")
    model.history = {"mistakes": mistakes, "steps": step}
    return model
