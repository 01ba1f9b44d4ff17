"""
Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with `pytest tests/test_acceptance.py -s` to see the lines inline;
they are also collected into the terminal summary.
"""
import io
import os
import random
import time

import numpy as np
import scipy.sparse as sp

from hand_corpus import NOTYPES, TYPED, hand_gold, hand_pred
from oracles import ami, brute_argmax, brute_log_Z, two_partitions
from test_distrib import TWO_CONTEXT, check_trace, random_corpus
from toydata import TOY_SCHEME, identity_instances, separable_corpus

from noisyner.cli import main
from noisyner.corpus import LabelScheme, Sentence, Token, read_conll, repair_bio, write_conll
from noisyner.distrib import (ClusterConfig, ClusterModel, read_paths, read_term_freq, train_brown,
                              write_paths, write_term_freq)
from noisyner.evaluate import score
from noisyner.features import FeatureConfig, Resources, apply_epoch_weight, extract
from noisyner.learner import (LearnerConfig, SequenceModel, forward_backward, load_model,
                              save_model, train_crf_lbfgs, train_perceptron, viterbi)
from noisyner.learner import lattice
from noisyner.learner.crf import CRFData, objective_and_gradient
from noisyner.learner.online import ChainWeights, compile_online, pa_step


def test_criterion_1_gradient_check(record):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    n = 60
    for _ in range(n):
        T, L, F = int(rng.integers(1, 6)), int(rng.integers(2, 5)), int(rng.integers(1, 31))
        X = sp.csr_matrix(rng.normal(size=(T, F)) * (rng.random((T, F)) < 0.3))
        data = CRFData([X], [list(rng.integers(0, L, size=T))], F, L)
        theta = rng.normal(scale=0.5, size=data.n_params)
        _, g = objective_and_gradient(theta, data, 10.0)
        num = np.zeros_like(theta)
        h = 1e-5
        for k in range(len(theta)):
            e = np.zeros_like(theta)
            e[k] = h
            num[k] = (objective_and_gradient(theta + e, data, 10.0)[0]
                      - objective_and_gradient(theta - e, data, 10.0)[0]) / (2 * h)
        err = np.linalg.norm(g - num) / max(np.linalg.norm(g), np.linalg.norm(num), 1e-12)
        worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 10.0
    record(1, ok, "{} instances, worst relative error {:.2e}, {:.2f}s".format(n, worst, elapsed))
    assert ok


def test_criterion_2_and_3_inference_oracle(record):
    rng = np.random.default_rng(202)
    max_dz, exact, worst_norm, worst_fb = 0.0, 0, 0.0, 0.0
    n = 200
    for _ in range(n):
        T, L = int(rng.integers(1, 7)), int(rng.integers(1, 6))
        # labels O, B-a, I-a, B-b, I-b give up to five; restrict the scheme to L of them
        scheme = LabelScheme(("a", "b"))
        labels = scheme.labels[:L]
        feats = ["f{}".format(j) for j in range(4)]
        w = {"{}∧{}".format(f, lab): float(rng.normal(scale=1.5)) for f in feats for lab in labels}
        for a in labels:
            w["T:<START>→" + a] = float(rng.normal())
            for b in labels:
                w["T:{}→{}".format(a, b)] = float(rng.normal())
        model = SequenceModel.from_weights(scheme, w)
        # labels beyond the first L are made unreachable by restricting the arrays
        vectors = [{f: float(rng.normal()) for f in feats if rng.random() < 0.7} for _ in range(T)]
        E = model.emission_scores(vectors)[:, :L]
        trans, start = model.transition[:L, :L], model.start[:L]
        res = lattice.forward_backward(E, trans, start)
        max_dz = max(max_dz, abs(res.log_Z - brute_log_Z(E, trans, start)))
        exact += lattice.viterbi(E, trans, start) == brute_argmax(E, trans, start)
        worst_norm = max(worst_norm, float(np.abs(res.unary.sum(axis=1) - 1).max()))
        worst_fb = max(worst_fb, abs(res.log_Z - res.log_Z_backward))
        if L == len(scheme.labels):
            # full-scheme instances also go through the model-level API
            full = forward_backward(model, vectors)
            assert abs(full.log_Z - res.log_Z) < 1e-12
            assert [scheme.labels.index(l) for l in viterbi(model, vectors)] == \
                brute_argmax(E, trans, start)
    ok2 = exact == n and max_dz <= 1e-8
    record(2, ok2, "{}/{} Viterbi exact, max |log_Z - brute| {:.1e}".format(exact, n, max_dz))
    ok3 = worst_norm <= 1e-9 and worst_fb <= 1e-6
    record(3, ok3, "max |sum unary - 1| {:.1e}, max |fwd - bwd log_Z| {:.1e}".format(
        worst_norm, worst_fb))
    assert ok2 and ok3


def test_criterion_4_memorization(record):
    inst = identity_instances(separable_corpus(20))
    crf = train_crf_lbfgs(inst, TOY_SCHEME, LearnerConfig(max_iterations=200))
    tokens = sum(len(y) for _, y in inst)
    right = sum(a == b for v, y in inst for a, b in zip(viterbi(crf, v), y))
    perc = train_perceptron(inst, TOY_SCHEME, LearnerConfig(epochs=10))
    mistakes = perc.history["mistakes"]
    ok = right == tokens and crf.history["iterations"] <= 200 and mistakes[-1] == 0
    record(4, ok, "crf-lbfgs {}/{} tokens after {} iterations; perceptron mistakes per epoch {}"
           .format(right, tokens, crf.history["iterations"], mistakes))
    assert ok


def test_criterion_5_brown_oracle(record):
    rng = np.random.default_rng(505)
    steps = 0
    for _ in range(25):
        corpus = random_corpus(rng, int(rng.integers(3, 9)))
        model = train_brown(corpus, ClusterConfig(num_classes=2), record_trace=True)
        check_trace(corpus, model)
        steps += len(model.trace)
    model = train_brown(TWO_CONTEXT, ClusterConfig(num_classes=2))
    found = frozenset(frozenset(ws) for ws in model.classes().values())
    vocab = {w for s in TWO_CONTEXT for w in s}
    scored = [(ami(TWO_CONTEXT, p), frozenset(p)) for p in two_partitions(vocab)]
    best = max(v for v, _ in scored)
    optima = {p for v, p in scored if v >= best - 1e-12}
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        write_paths(train_brown(random_corpus(np.random.default_rng(9), 8, 30),
                                ClusterConfig(num_classes=2)), buf)
        outs.append(buf.getvalue().encode())
    ok = found in optima and outs[0] == outs[1]
    record(5, ok, "{} greedy steps match the exhaustive oracle; two-context partition {} is "
           "among {} brute-force optima; repeated runs byte-identical: {}".format(
               steps, sorted(sorted(c) for c in found), len(optima), outs[0] == outs[1]))
    assert ok


def test_criterion_6_feature_templates(record):
    cfg = FeatureConfig(use_termfreq=False, use_gazetteers=False, new_epochs={"2015"})
    clusters = ClusterModel({"London": "11110011111011"}, {}, 2000)
    s = Sentence([Token("London"), Token("calling")], epoch="2010")
    vecs = extract(s, Resources(clusters=clusters), cfg)
    weighted = apply_epoch_weight(vecs, s, cfg)
    shapes = "shape-Xxxxxx" in vecs[0] and "shapeshort-Xx" in vecs[0]
    cluster = "p14x11110011111011" in vecs[0] and "prev_p14x11110011111011" in vecs[1]
    scaled = all(w[k] == 0.7 * v[k] for v, w in zip(vecs, weighted) for k in v)
    ok = shapes and cluster and scaled
    record(6, ok, "shapes {}, cluster prefix names {}, 0.7 scaling exact {}".format(
        shapes, cluster, scaled))
    assert ok


def test_criterion_7_scorer(record):
    gold, pred = hand_gold(), hand_pred()
    t = score(gold, pred, "typed").overall
    u = score(gold, pred, "notypes").overall
    hand = ((t.precision, t.recall, t.f1, t.correct_count) ==
            (TYPED["p"], TYPED["r"], TYPED["f1"], TYPED["correct"]) and
            (u.precision, u.recall, u.f1, u.correct_count) ==
            (NOTYPES["p"], NOTYPES["r"], NOTYPES["f1"], NOTYPES["correct"]))
    rng = random.Random(707)
    labels = LabelScheme(("a", "b", "c")).labels
    violations = 0
    for _ in range(100):
        g, p = [], []
        for _ in range(rng.randint(1, 6)):
            T = rng.randint(1, 8)
            toks = [Token("t{}".format(i)) for i in range(T)]
            g.append(Sentence(toks, repair_bio([rng.choice(labels) for _ in range(T)])))
            p.append(Sentence(toks, repair_bio([rng.choice(labels) for _ in range(T)])))
        if score(g, p, "typed").overall.correct_count > score(g, p, "notypes").overall.correct_count:
            violations += 1
    ok = hand and violations == 0
    record(7, ok, "hand corpus typed P/R/F1 {:.2f}/{:.2f}/{:.2f}, notypes {:.2f}/{:.2f}/{:.2f}; "
           "typed > notypes correct on {}/100 random corpora".format(
               t.precision, t.recall, t.f1, u.precision, u.recall, u.f1, violations))
    assert ok


def test_criterion_8_pa_properties(record):
    rng = np.random.default_rng(808)
    labels = TOY_SCHEME.labels
    inst = []
    for _ in range(60):
        T = int(rng.integers(1, 7))
        inst.append(([{"f{}".format(j): float(rng.normal()) for j in range(6) if rng.random() < 0.5}
                      for _ in range(T)], [labels[int(k)] for k in rng.integers(0, 5, size=T)]))
    data, index = compile_online(inst, TOY_SCHEME)
    updates, over = 0, 0
    while updates < 1000:
        C = float(rng.choice([0.01, 0.1, 1.0, 10.0]))
        w = ChainWeights(len(index), len(labels))
        for _ in range(5):
            for d in data:
                tau, _, _ = pa_step(w, d, C)
                if tau > 0:
                    updates += 1
                    over += tau > C
    sep = identity_instances(separable_corpus(20))
    sdata, sindex = compile_online(sep, TOY_SCHEME)
    crf = train_crf_lbfgs(sep, TOY_SCHEME)
    w = ChainWeights(len(sindex), len(labels))
    w.W = 50 * crf.emission[[crf.index[f] for f in sindex]]
    w.trans, w.start = 50 * crf.transition, 50 * crf.start
    passive = sum(pa_step(w, d, 1.0)[0] > 0 for d in sdata)
    ok = over == 0 and passive == 0
    record(8, ok, "{} updates, {} with tau > C; {} updates on {} satisfied instances".format(
        updates, over, passive, len(sdata)))
    assert ok


def _round_trips(tmp, paths, tf, models, tagged):
    with open(paths, encoding="utf-8") as f:
        text = f.read()
    buf = io.StringIO()
    write_paths(read_paths(io.StringIO(text)), buf)
    ok = buf.getvalue() == text
    with open(tf, encoding="utf-8") as f:
        text = f.read()
    buf = io.StringIO()
    write_term_freq(read_term_freq(io.StringIO(text)), buf)
    ok &= buf.getvalue() == text
    for m in models:
        with open(m, encoding="utf-8") as f:
            text = f.read()
        buf = io.StringIO()
        save_model(load_model(io.StringIO(text)), buf)
        ok &= buf.getvalue() == text
    for t in tagged:
        with open(t, encoding="utf-8") as f:
            text = f.read()
        buf = io.StringIO()
        write_conll(read_conll(io.StringIO(text)), buf)
        ok &= buf.getvalue() == text
    return ok


def test_criterion_9_end_to_end(record, synth_dir, tmp_path, capsys):
    d = synth_dir
    n_sent = sum(len(read_conll(open(os.path.join(d, f), encoding="utf-8")))
                 for f in ("train_2010.conll", "dev_2015.conll", "test_2015.conll"))
    t0 = time.perf_counter()
    paths, tf = tmp_path / "paths.txt", tmp_path / "tf.txt"
    codes = [main(["cluster", "--input", os.path.join(d, "unlabeled.txt"), "--classes", "32",
                   "--out", str(paths), "--termfreq-out", str(tf)])]
    results, models, tagged = {}, [], []
    for learner in ("crf-lbfgs", "crf-pa", "perceptron"):
        model = tmp_path / (learner + ".model")
        out = tmp_path / (learner + ".conll")
        codes.append(main(["train", "--learner", learner,
                           "--train", os.path.join(d, "train_2010.conll") + ":2010",
                           "--train", os.path.join(d, "dev_2015.conll") + ":2015",
                           "--new-epochs", "2015", "--old-weight", "0.7",
                           "--clusters", str(paths), "--termfreq", str(tf),
                           "--gazetteers", os.path.join(d, "gazetteers.tsv"),
                           "--model-out", str(model)]))
        codes.append(main(["tag", "--model", str(model), "--input",
                           os.path.join(d, "test_2015.conll"), "--out", str(out)]))
        capsys.readouterr()
        codes.append(main(["eval", "--gold", os.path.join(d, "test_2015.conll"),
                           "--pred", str(out), "--notypes", "--kv"]))
        kv = dict(l.split("=", 1) for l in capsys.readouterr().out.splitlines())
        # --kv prints the typed block then the notypes block; the later overall.f1 wins
        gold = read_conll(open(os.path.join(d, "test_2015.conll"), encoding="utf-8"))
        pred = read_conll(open(out, encoding="utf-8"))
        results[learner] = (score(gold, pred, "typed").f1, score(gold, pred, "notypes").f1)
        assert float(kv["overall.f1"]) == round(results[learner][1], 2)
        models.append(model)
        tagged.append(out)
    elapsed = time.perf_counter() - t0
    trips = _round_trips(tmp_path, paths, tf, models, tagged)
    order = all(nt >= ty for ty, nt in results.values())
    ok = n_sent == 200 and all(c == 0 for c in codes) and elapsed < 60 and order and trips
    detail = ", ".join("{} typed {:.2f} notypes {:.2f}".format(k, *v) for k, v in results.items())
    record(9, ok, "{} sentences, {:.1f}s; {}; round-trips {}".format(n_sent, elapsed, detail, trips))
    assert ok
