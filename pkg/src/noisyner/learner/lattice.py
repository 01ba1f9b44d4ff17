"""
Array-level inference for first-order linear chains.

Scores are given as an emission matrix E (T x L), a transition matrix
trans[prev, cur] (L x L) and a start vector (L). The batched routines take
E padded to (B x Tmax x L) together with the true lengths.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def logsumexp(a, axis):
    """Stable log(sum(exp(a))) along one axis; all -inf slices give -inf."""
    m = a.max(axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.exp(a - m).sum(axis=axis, keepdims=True)) + m
    return out.squeeze(axis)


@dataclass
class LatticeScores:
    log_alpha: np.ndarray
    log_beta: np.ndarray
    log_Z: float
    log_Z_backward: float
    unary: np.ndarray       # T x L
    pairwise: np.ndarray    # (T-1) x L x L, [t-1] is the (t-1, t) edge


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite weight or feature value in lattice")


def path_score(E, trans, start, labels):
    labels = np.asarray(labels)
    s = start[labels[0]] + E[np.arange(len(labels)), labels].sum()
    if len(labels) > 1:
        s += trans[labels[:-1], labels[1:]].sum()
    return float(s)


def batch_forward_backward(E, lengths, trans, start):
    """
    Log-space forward-backward over a padded batch.

    Returns (log_alpha, log_beta, log_Z, log_Z_backward); entries beyond a
    sequence's length are padding and carry no meaning.
    """
    B, T, L = E.shape
    lengths = np.asarray(lengths)
    alpha = np.empty((B, T, L))
    beta = np.zeros((B, T, L))
    alpha[:, 0] = start[None, :] + E[:, 0]
    for t in range(1, T):
        a = logsumexp(alpha[:, t - 1, :, None] + trans[None], axis=1) + E[:, t]
        live = (t < lengths)[:, None]
        alpha[:, t] = np.where(live, a, alpha[:, t - 1])
    for t in range(T - 2, -1, -1):
        b = logsumexp(trans[None] + (E[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
        live = (t + 1 < lengths)[:, None]
        beta[:, t] = np.where(live, b, 0.0)
    log_Z = logsumexp(alpha[np.arange(B), lengths - 1], axis=1)
    log_Z_back = logsumexp(start[None, :] + E[:, 0] + beta[:, 0], axis=1)
    return alpha, beta, log_Z, log_Z_back


def batch_marginals(E, lengths, trans, alpha, beta, log_Z):
    """Unary (B x T x L) and pairwise (B x T x L x L, edge ending at t) marginals, zero on padding."""
    B, T, L = E.shape
    lengths = np.asarray(lengths)
    valid = np.arange(T)[None, :] < lengths[:, None]
    unary = np.exp(alpha + beta - log_Z[:, None, None]) * valid[:, :, None]
    pairwise = np.zeros((B, T, L, L))
    if T > 1:
        logp = (alpha[:, :-1, :, None] + trans[None, None]
                + (E[:, 1:] + beta[:, 1:])[:, :, None, :] - log_Z[:, None, None, None])
        pairwise[:, 1:] = np.exp(logp) * valid[:, 1:, None, None]
    return unary, pairwise


def forward_backward(E, trans, start) -> LatticeScores:
    E = np.asarray(E, dtype=float)
    _check_finite(E, trans, start)
    if E.shape[0] == 0:
        raise ValueError("forward_backward needs at least one position")
    T = E.shape[0]
    alpha, beta, log_Z, log_Z_back = batch_forward_backward(E[None], [T], trans, start)
    unary, pairwise = batch_marginals(E[None], [T], trans, alpha, beta, log_Z)
    return LatticeScores(alpha[0], beta[0], float(log_Z[0]), float(log_Z_back[0]),
                         unary[0], pairwise[0, 1:])


def viterbi(E, trans, start):
    """
    Best label index sequence. Ties go to the earlier label, both for the
    final position and at every backpointer.
    """
    E = np.asarray(E, dtype=float)
    T, L = E.shape
    if T == 0:
        raise ValueError("viterbi needs at least one position")
    delta = start + E[0]
    back = np.zeros((T, L), dtype=np.int64)
    for t in range(1, T):
        cand = delta[:, None] + trans
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(L)] + E[t]
    best = [int(np.argmax(delta))]
    for t in range(T - 1, 0, -1):
        best.append(int(back[t, best[-1]]))
    best.reverse()
    return best
