"""
Distributional word resources: Brown clusters and a top-K term-frequency model.

Brown clustering here is the windowed greedy formulation. Words are added
in order of decreasing frequency; whenever num_classes + 1 clusters are
active, the pair whose merge loses the least average mutual information
(AMI) of the class bigram distribution is merged. Once every word has been
added, the remaining clusters are merged down to one, and those final merges
define the bit-paths (first/earlier cluster gets 0, the other 1).

AMI is taken over within-sentence bigrams of in-vocabulary words:

    AMI = sum_{c,d} p(c,d) log[ p(c,d) / (p_left(c) p_right(d)) ]

where p_left(c) and p_right(d) count every bigram whose left (right) word
belongs to the cluster, whether or not the other word is active yet.
"""
from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_DEPTHS = (3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20)
DEFAULT_TF_CUTOFF = 50000
TF_SCALE = 100.0

# merges whose AMI loss differs by less than this are treated as tied
_TIE_TOL = 1e-12


@dataclass
class ClusterConfig:
    num_classes: int = 2000
    min_count: int = 1
    depths: tuple = DEFAULT_DEPTHS

    def __post_init__(self):
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")
        if self.min_count < 0:
            raise ValueError("min_count must be non-negative")
        depths = tuple(self.depths)
        if any(d <= 0 for d in depths) or any(a >= b for a, b in zip(depths, depths[1:])):
            raise ValueError("depths must be positive and strictly increasing: {}".format(depths))
        self.depths = depths


@dataclass(frozen=True)
class MergeStep:
    """One greedy merge: the active clusters before it, the pair merged, AMI after."""
    active: tuple
    merged: tuple
    ami: float
    final_phase: bool


@dataclass
class ClusterModel:
    paths: dict
    counts: dict
    num_classes: int
    trace: Optional[list] = field(default=None, repr=False, compare=False)

    def path(self, word):
        return self.paths.get(word)

    def classes(self):
        """Leaf classes as {path: sorted word list}."""
        out = defaultdict(list)
        for w, p in self.paths.items():
            out[p].append(w)
        return {p: sorted(ws) for p, ws in out.items()}

    def __len__(self):
        return len(self.paths)


def bit_prefix(path: str, depth: int) -> str:
    if not path:
        raise ValueError("empty cluster path")
    return path[:depth]


def lookup_path(model: ClusterModel, word: str) -> Optional[str]:
    return model.paths.get(word)


def _q(p, pl, pr):
    """Elementwise p*log(p/(pl*pr)), with 0 where p == 0."""
    p = np.asarray(p, dtype=float)
    out = np.zeros(np.broadcast(p, pl, pr).shape)
    mask = np.broadcast_to(p > 0, out.shape)
    pb = np.broadcast_to(p, out.shape)[mask]
    denom = np.broadcast_to(pl * pr, out.shape)[mask]
    out[mask] = pb * np.log(pb / denom)
    return out


class _Clusterer:
    """Greedy AMI merging over a growing set of active clusters."""

    def __init__(self, right, left, nleft, nright, total, record):
        self.right = right
        self.left = left
        self.nleft_word = nleft
        self.nright_word = nright
        self.total = float(total) if total > 0 else 1.0
        self.members = []       # per active slot: list of words
        self.minword = []
        self.C = np.zeros((0, 0))
        self.nl = np.zeros(0)
        self.nr = np.zeros(0)
        self.cluster_of = {}    # word -> stable cluster id
        self.ids = []           # per active slot: cluster id
        self.pos = {}           # cluster id -> active slot
        self.next_id = 0
        self.trees = []
        self.record = record
        self.trace = [] if record else None

    def add_word(self, w):
        s = len(self.members)
        row = np.zeros(s + 1)
        col = np.zeros(s + 1)
        for v, c in self.right[w].items():
            if v == w:
                row[s] += c
            elif v in self.cluster_of:
                row[self.pos[self.cluster_of[v]]] += c
        for v, c in self.left[w].items():
            if v != w and v in self.cluster_of:
                col[self.pos[self.cluster_of[v]]] += c
        C = np.zeros((s + 1, s + 1))
        C[:s, :s] = self.C
        C[s, :] = row
        C[:s, s] = col[:s]
        self.C = C
        self.nl = np.append(self.nl, self.nleft_word[w])
        self.nr = np.append(self.nr, self.nright_word[w])
        self.members.append([w])
        self.minword.append(w)
        self.trees.append(w)
        self.ids.append(self.next_id)
        self.pos[self.next_id] = s
        self.cluster_of[w] = self.next_id
        self.next_id += 1

    def ami(self):
        P = self.C / self.total
        return float(_q(P, self.nl[:, None] / self.total, self.nr[None, :] / self.total).sum())

    def merge_losses(self):
        """Matrix of AMI loss for merging each active pair (i < j); inf elsewhere."""
        n = self.total
        P = self.C / n
        pl = self.nl / n
        pr = self.nr / n
        Q = _q(P, pl[:, None], pr[None, :])
        rowq = Q.sum(axis=1)
        colq = Q.sum(axis=0)
        A = len(pl)
        loss = np.full((A, A), np.inf)
        for i in range(A - 1):
            js = np.arange(i + 1, A)
            plm = pl[i] + pl[js]
            prm = pr[i] + pr[js]
            removed = (rowq[i] + rowq[js] + colq[i] + colq[js]
                       - Q[i, i] - Q[js, js] - Q[i, js] - Q[js, i])
            # merged cluster as left element, against every other cluster c
            rows = P[i][None, :] + P[js, :]
            addrow = _q(rows, plm[:, None], pr[None, :]).sum(axis=1)
            addrow -= _q(rows[:, i], plm, pr[i]) + _q(rows[np.arange(len(js)), js], plm, pr[js])
            cols = P[:, i][None, :] + P[:, js].T
            addcol = _q(cols, pl[None, :], prm[:, None]).sum(axis=1)
            addcol -= _q(cols[:, i], pl[i], prm) + _q(cols[np.arange(len(js)), js], pl[js], prm)
            addself = _q(P[i, i] + P[i, js] + P[js, i] + P[js, js], plm, prm)
            loss[i, js] = removed - (addrow + addcol + addself)
        return loss

    def best_pair(self):
        loss = self.merge_losses()
        best = loss.min()
        tied = np.argwhere(loss <= best + _TIE_TOL * max(1.0, abs(best)))
        key = lambda ij: tuple(sorted((self.minword[ij[0]], self.minword[ij[1]])))
        i, j = min((tuple(ij) for ij in tied), key=key)
        return i, j

    def merge(self, i, j, final_phase):
        if self.record:
            before = tuple(frozenset(m) for m in self.members)
        C = self.C
        C[i, :] += C[j, :]
        C[:, i] += C[:, j]
        self.C = np.delete(np.delete(C, j, axis=0), j, axis=1)
        self.nl[i] += self.nl[j]
        self.nr[i] += self.nr[j]
        self.nl = np.delete(self.nl, j)
        self.nr = np.delete(self.nr, j)
        for w in self.members[j]:
            self.cluster_of[w] = self.ids[i]
        self.members[i].extend(self.members[j])
        self.minword[i] = min(self.minword[i], self.minword[j])
        if final_phase:
            self.trees[i] = (self.trees[i], self.trees[j])
        del self.members[j], self.minword[j], self.trees[j], self.pos[self.ids[j]], self.ids[j]
        for slot in range(j, len(self.ids)):
            self.pos[self.ids[slot]] = slot
        if self.record:
            self.trace.append(MergeStep(before, (before[i], before[j]), self.ami(), final_phase))


def _count_bigrams(sentences, keep):
    right = defaultdict(Counter)
    left = defaultdict(Counter)
    nleft = Counter()
    nright = Counter()
    total = 0
    for sent in sentences:
        for a, b in zip(sent, sent[1:]):
            if a in keep and b in keep:
                right[a][b] += 1
                left[b][a] += 1
                nleft[a] += 1
                nright[b] += 1
                total += 1
    return right, left, nleft, nright, total


def _leaf_paths(tree, prefix, out):
    if isinstance(tree, tuple):
        _leaf_paths(tree[0], prefix + "0", out)
        _leaf_paths(tree[1], prefix + "1", out)
    else:
        out[tree] = prefix or "0"


def train_brown(corpus: Iterable[Sequence[str]], config: ClusterConfig = ClusterConfig(),
                record_trace=False) -> ClusterModel:
    """
    Cluster the words of `corpus` (an iterable of token sequences).

    With record_trace=True the returned model carries the full list of
    MergeStep records, which is only sensible for small vocabularies.
    """
    sentences = [list(s) for s in corpus]
    counts = Counter(w for s in sentences for w in s)
    if not counts:
        raise ValueError("cannot cluster an empty corpus")
    floor = max(config.min_count, 1)
    vocab = sorted((w for w, c in counts.items() if c >= floor), key=lambda w: (-counts[w], w))
    if not vocab:
        raise ValueError("no word reaches min_count={}".format(config.min_count))
    keep = set(vocab)
    right, left, nleft, nright, total = _count_bigrams(sentences, keep)

    m = config.num_classes
    if len(vocab) < m:
        logger.warning("only %d distinct words for %d classes; each word gets its own class",
                       len(vocab), m)
    cl = _Clusterer(right, left, nleft, nright, total, record_trace)
    for w in vocab:
        cl.add_word(w)
        if len(cl.members) > m:
            i, j = cl.best_pair()
            cl.merge(i, j, final_phase=False)
    # each leaf class is named by its earliest (most frequent) word until paths exist
    leaf_members = {}
    for slot, members in enumerate(cl.members):
        leaf_members[cl.trees[slot]] = list(members)
    while len(cl.members) > 1:
        i, j = cl.best_pair()
        cl.merge(i, j, final_phase=True)
    leaf_path = {}
    _leaf_paths(cl.trees[0], "", leaf_path)
    paths = {}
    for leaf, members in leaf_members.items():
        for w in members:
            paths[w] = leaf_path[leaf]
    logger.info("clustered %d words into %d classes", len(paths), len(leaf_members))
    return ClusterModel(paths, {w: counts[w] for w in vocab}, m, cl.trace)


def write_paths(model: ClusterModel, stream: TextIO) -> None:
    for word in sorted(model.paths, key=lambda w: (model.paths[w], w)):
        stream.write("{}\t{}\t{}\n".format(model.paths[word], word, model.counts.get(word, 1)))


def read_paths(stream: TextIO, num_classes=None) -> ClusterModel:
    """Read a `bitpath<TAB>word<TAB>count` file (count column optional)."""
    paths, counts = {}, {}
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) not in (2, 3) or not cols[0] or set(cols[0]) - {"0", "1"}:
            raise ValueError("line {}: malformed cluster path line: {!r}".format(lineno, line))
        paths[cols[1]] = cols[0]
        counts[cols[1]] = int(cols[2]) if len(cols) == 3 else 1
    if num_classes is None:
        num_classes = max(1, len(set(paths.values())))
    return ClusterModel(paths, counts, num_classes)


@dataclass
class TermFrequencyModel:
    relfreq: dict
    cutoff_rank: int = DEFAULT_TF_CUTOFF
    total_tokens: int = 0


def build_term_freq(corpus: Iterable[Sequence[str]],
                    cutoff_rank: int = DEFAULT_TF_CUTOFF) -> TermFrequencyModel:
    """Relative frequencies over the whole corpus, truncated to the top cutoff_rank words."""
    if cutoff_rank < 1:
        raise ValueError("cutoff_rank must be positive")
    counts = Counter(w for sent in corpus for w in sent)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("cannot build term frequencies from an empty corpus")
    ranked = sorted(counts, key=lambda w: (-counts[w], w))[:cutoff_rank]
    return TermFrequencyModel({w: counts[w] / total for w in ranked}, cutoff_rank, total)


def term_freq_feature_value(model: TermFrequencyModel, word: str) -> Optional[float]:
    rf = model.relfreq.get(word)
    return None if rf is None else TF_SCALE * rf


def write_term_freq(model: TermFrequencyModel, stream: TextIO) -> None:
    stream.write("#total_tokens={}\n".format(model.total_tokens))
    for word in sorted(model.relfreq, key=lambda w: (-model.relfreq[w], w)):
        stream.write("{}\t{!r}\n".format(word, model.relfreq[word]))


def read_term_freq(stream: TextIO) -> TermFrequencyModel:
    relfreq = {}
    total = 0
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        if lineno == 1 and line.startswith("#total_tokens="):
            total = int(line.split("=", 1)[1])
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError("line {}: expected word<TAB>relfreq".format(lineno))
        value = float(cols[1])
        if not 0 < value <= 1 or math.isnan(value):
            raise ValueError("line {}: relative frequency out of (0,1]: {}".format(lineno, value))
        relfreq[cols[0]] = value
    return TermFrequencyModel(relfreq, max(1, len(relfreq)), total)
