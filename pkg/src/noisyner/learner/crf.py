"""Linear-chain CRF: regularized conditional log-likelihood and L-BFGS training."""
from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp

from .lattice import batch_forward_backward
from .lbfgs import minimize
from .model import (ARROW, EMISSION_SEP, START, LearnerConfig, SequenceModel, build_index,
                    encode)

logger = logging.getLogger(__name__)


class CRFData:
    """
    A labeled dataset compiled to arrays.

    Parameters are flattened as [emission (F x L), transition (L x L), start (L)].
    """

    def __init__(self, matrices, label_seqs, n_features, n_labels):
        if not matrices:
            raise ValueError("CRF training needs at least one instance")
        self.F = n_features
        self.L = n_labels
        self.lengths = np.array([m.shape[0] for m in matrices], dtype=np.int64)
        if np.any(self.lengths == 0):
            raise ValueError("empty instance in CRF data")
        self.B = len(matrices)
        self.T = int(self.lengths.max())
        self.X = sp.vstack(matrices, format="csr") if n_features else \
            sp.csr_matrix((int(self.lengths.sum()), 0))
        self.b_idx = np.repeat(np.arange(self.B), self.lengths)
        self.t_idx = np.concatenate([np.arange(n) for n in self.lengths])
        self.y = np.concatenate([np.asarray(y, dtype=np.int64) for y in label_seqs])
        if len(self.y) != self.X.shape[0]:
            raise ValueError("label/feature length mismatch")
        Y = sp.csr_matrix((np.ones(len(self.y)), (np.arange(len(self.y)), self.y)),
                          shape=(len(self.y), n_labels))
        self.emp_emission = np.asarray((self.X.T @ Y).todense()) if n_features else \
            np.zeros((0, n_labels))
        self.emp_trans = np.zeros((n_labels, n_labels))
        self.emp_start = np.zeros(n_labels)
        for y in label_seqs:
            self.emp_start[y[0]] += 1
            y = np.asarray(y, dtype=np.int64)
            np.add.at(self.emp_trans, (y[:-1], y[1:]), 1)

    @property
    def n_params(self):
        return self.F * self.L + self.L * self.L + self.L

    def unpack(self, theta):
        F, L = self.F, self.L
        W = theta[:F * L].reshape(F, L)
        trans = theta[F * L:F * L + L * L].reshape(L, L)
        start = theta[F * L + L * L:]
        return W, trans, start


def objective_and_gradient(theta, data: CRFData, l2_sigma2):
    """Regularized log-likelihood and its gradient at flat parameters theta."""
    W, trans, start = data.unpack(theta)
    E_flat = np.asarray(data.X @ W) if data.F else np.zeros((len(data.y), data.L))
    E = np.zeros((data.B, data.T, data.L))
    E[data.b_idx, data.t_idx] = E_flat
    alpha, beta, log_Z, _ = batch_forward_backward(E, data.lengths, trans, start)

    gold = (E_flat[np.arange(len(data.y)), data.y].sum()
            + (trans * data.emp_trans).sum() + start @ data.emp_start)
    ll = gold - log_Z.sum()

    unary = np.exp(alpha + beta - log_Z[:, None, None])
    U = unary[data.b_idx, data.t_idx]
    exp_start = unary[:, 0].sum(axis=0)
    exp_trans = np.zeros_like(trans)
    for t in range(1, data.T):
        live = t < data.lengths
        if not live.any():
            break
        logp = (alpha[live, t - 1, :, None] + trans[None]
                + (E[live, t] + beta[live, t])[:, None, :] - log_Z[live, None, None])
        exp_trans += np.exp(logp).sum(axis=0)
    exp_emission = np.asarray(data.X.T @ U) if data.F else np.zeros((0, data.L))

    grad = np.concatenate([(data.emp_emission - exp_emission).ravel(),
                           (data.emp_trans - exp_trans).ravel(),
                           data.emp_start - exp_start])
    if np.isfinite(l2_sigma2):
        ll -= float(theta @ theta) / (2.0 * l2_sigma2)
        grad -= theta / l2_sigma2
    return float(ll), grad


def compile_instances(instances, scheme, index=None):
    """(vectors, label strings) pairs -> (CRFData, feature index)."""
    if index is None:
        index = build_index(instances)
    labels = scheme.labels
    mats, ys = [], []
    for vectors, y in instances:
        if y is None:
            raise ValueError("CRF training instance is unlabeled")
        if len(y) != len(vectors):
            raise ValueError("instance has {} labels for {} positions".format(len(y), len(vectors)))
        mats.append(encode(vectors, index))
        ys.append([labels.index(l) for l in y])
    return CRFData(mats, ys, len(index), len(labels)), index


def _pack(model):
    return np.concatenate([model.emission.ravel(), model.transition.ravel(), model.start])


def crf_objective_and_gradient(instances, model: SequenceModel, config: LearnerConfig = LearnerConfig()):
    """
    Objective and named gradient for a model's current weights.

    Observation features absent from the model's alphabet are ignored, so
    build the model over the data's full alphabet when checking gradients.
    """
    data, _ = compile_instances(instances, model.scheme, model.index)
    obj, grad = objective_and_gradient(_pack(model), data, config.l2_sigma2)
    G, gT, gS = data.unpack(grad)
    labels = model.labels
    named = {}
    for f, row in zip(model.features, G):
        for j, label in enumerate(labels):
            named[f + EMISSION_SEP + label] = float(row[j])
    for j, label in enumerate(labels):
        named["T:" + START + ARROW + label] = float(gS[j])
        for i, prev in enumerate(labels):
            named["T:" + prev + ARROW + label] = float(gT[i, j])
    return obj, named


def train_crf_lbfgs(instances, scheme, config: LearnerConfig = LearnerConfig()) -> SequenceModel:
    """Maximize the regularized conditional log-likelihood with L-BFGS."""
    data, index = compile_instances(instances, scheme)
    logger.info("CRF: %d instances, %d features, %d labels, %d parameters",
                data.B, data.F, data.L, data.n_params)

    def neg(theta):
        obj, grad = objective_and_gradient(theta, data, config.l2_sigma2)
        return -obj, -grad

    res = minimize(neg, np.zeros(data.n_params), memory=config.lbfgs_memory,
                   max_iterations=config.max_iterations, grad_tolerance=config.grad_tolerance)
    logger.info("L-BFGS stopped after %d iterations (%s), objective %.6f",
                res.iterations, res.message, -res.f)
    W, trans, start = data.unpack(res.x)
    model = SequenceModel(scheme, list(index), W.copy(), trans.copy(), start.copy(), "crf-lbfgs")
    model.history = {"objective": [-f for f in res.history], "iterations": res.iterations,
                     "converged": res.converged, "message": res.message}
    return model
