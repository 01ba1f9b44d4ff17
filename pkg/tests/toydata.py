"""Small random and separable problems shared by the learner tests."""
import numpy as np
import scipy.sparse as sp

from noisyner.corpus import LabelScheme

TOY_SCHEME = LabelScheme(("per", "loc"))

LEXICON = {
    "alice": "B-per", "bob": "B-per", "smith": "I-per", "jones": "I-per",
    "paris": "B-loc", "rome": "B-loc", "city": "I-loc",
    "went": "O", "to": "O", "met": "O", "in": "O", "the": "O", "and": "O",
}

PATTERNS = [
    ["alice", "smith", "went", "to", "paris"],
    ["bob", "met", "alice", "in", "rome"],
    ["the", "bob", "jones", "and", "alice"],
    ["paris", "city", "and", "rome"],
    ["alice", "went", "to", "rome", "city"],
]


def separable_corpus(n=20, seed=0):
    """n sentences where each word's identity fixes its label."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        words = list(PATTERNS[i % len(PATTERNS)])
        if rng.random() < 0.5:
            words = words[::-1] if not any(LEXICON[w].startswith("I") for w in words) else words
        out.append((words, [LEXICON[w] for w in words]))
    return out


def identity_instances(corpus):
    return [([{"w=" + w: 1.0} for w in words], labels) for words, labels in corpus]


def random_lattice(rng, T, L, scale=2.0):
    return (rng.normal(scale=scale, size=(T, L)), rng.normal(scale=scale, size=(L, L)),
            rng.normal(scale=scale, size=L))


def random_crf_problem(rng, B=3, max_T=5, L=3, F=6, density=0.4):
    """CRF data ingredients: sparse matrices, label sequences, and a parameter vector."""
    mats, ys = [], []
    for _ in range(B):
        T = int(rng.integers(1, max_T + 1))
        dense = rng.normal(size=(T, F)) * (rng.random((T, F)) < density)
        mats.append(sp.csr_matrix(dense))
        ys.append(list(rng.integers(0, L, size=T)))
    theta = rng.normal(scale=0.5, size=F * L + L * L + L)
    return mats, ys, theta
