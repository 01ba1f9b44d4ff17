import io

import pytest
from hypothesis import given, strategies as st

from noisyner.corpus import Sentence, Token
from noisyner.distrib import ClusterModel, TermFrequencyModel
from noisyner.features import (FeatureConfig, Resources, apply_epoch_weight, collapse_runs,
                               extract, shape, shape_short, write_feature_dump)
from noisyner.gazetteer import GazetteerCatalog, GazetteerEntry

NO_RESOURCES = FeatureConfig(use_clusters=False, use_termfreq=False, use_gazetteers=False)


def sent(*words, epoch=None, labels=None):
    return Sentence([Token(w) for w in words], labels, epoch=epoch)


@pytest.mark.parametrize("word, full, short", [
    ("London", "Xxxxxx", "Xx"),
    ("@user1", "@xxxx0", "@x0"),
    ("...", "...", "."),
    ("e.g", "x.x", "x.x"),
    ("2015", "0000", "0"),
])
def test_shapes(word, full, short):
    assert shape(word) == full
    assert shape_short(word) == short


@given(st.text(min_size=1, max_size=12))
def test_shape_short_is_collapse_of_shape(word):
    assert shape_short(word) == collapse_runs(shape(word))
    assert collapse_runs(collapse_runs(word)) == collapse_runs(word)


def test_london_template():
    vec = extract(sent("London", "calling"), Resources(), NO_RESOURCES)[0]
    for name in ["w=London", "w[1]=calling", "w[-1]=<s>", "shape-Xxxxxx", "shapeshort-Xx",
                 "length-6", "pref=L", "pref=Lo", "pref=Lon", "suff=n", "suff=on", "suff=don"]:
        assert vec[name] == 1.0
    assert vec["w[-2]|w[-1]=<s>|<s>"] == 1.0
    assert vec["w[0]|w[1]=London|calling"] == 1.0
    assert sum(k.startswith("w[") and "|" in k for k in vec) == 4


def test_short_word_affixes():
    vec = extract(sent("at"), Resources(), NO_RESOURCES)[0]
    assert {k for k in vec if k.startswith(("pref=", "suff="))} == {"pref=a", "pref=at",
                                                                   "suff=t", "suff=at"}


def test_pos_feature():
    s = Sentence([Token("London", "NNP")])
    assert "pos=NNP" in extract(s, Resources(), NO_RESOURCES)[0]
    cfg = FeatureConfig(use_pos=False, use_clusters=False, use_termfreq=False, use_gazetteers=False)
    assert "pos=NNP" not in extract(s, Resources(), cfg)[0]


def _clusters():
    return ClusterModel({"xbox": "11110011111011", "my": "0101"}, {}, 2000)


def test_cluster_prefixes():
    cfg = FeatureConfig(use_termfreq=False, use_gazetteers=False)
    vecs = extract(sent("my", "xbox", "lol"), Resources(clusters=_clusters()), cfg)
    xbox = vecs[1]
    assert xbox["p3x111"] == 1.0 and xbox["p4x1111"] == 1.0
    assert xbox["p14x11110011111011"] == 1.0
    assert xbox["prev_p3x010"] == 1.0
    assert not any(k.startswith("p") and k[1].isdigit() for k in vecs[2])
    assert "prev_p3x111" in vecs[2]
    assert not any(k.startswith("prev_p") for k in vecs[0])


def test_termfreq_and_gazetteer_features():
    res = Resources(termfreq=TermFrequencyModel({"lol": 0.02}),
                    gazetteers=GazetteerCatalog([GazetteerEntry(("xbox",), "Freebase_videogameplatform")]))
    cfg = FeatureConfig(use_clusters=False)
    vecs = extract(sent("Xbox", "lol"), res, cfg)
    assert vecs[0]["in_gaz=Freebase_videogameplatform"] == 1.0
    assert "tf" not in vecs[0]
    assert vecs[1]["tf"] == pytest.approx(2.0)


def test_missing_resource_named():
    with pytest.raises(ValueError, match="clusters"):
        extract(sent("a"), Resources(), FeatureConfig(use_termfreq=False, use_gazetteers=False))


def test_empty_sentence_rejected():
    with pytest.raises(ValueError):
        extract(Sentence([]), Resources(), NO_RESOURCES)


def test_epoch_weighting():
    cfg = FeatureConfig(use_clusters=False, use_termfreq=False, use_gazetteers=False,
                        new_epochs={"2015"})
    for epoch, factor in (("2010", 0.7), ("2015", 1.0)):
        s = sent("London", "calling", epoch=epoch)
        raw = extract(s, Resources(), cfg)
        weighted = apply_epoch_weight(raw, s, cfg)
        for r, w in zip(raw, weighted):
            assert r.keys() == w.keys()
            assert all(w[k] == r[k] * factor for k in r)
    assert apply_epoch_weight(raw, sent("x", epoch="2010"), FeatureConfig(
        old_epoch_weight=1.0)) == raw


def test_invalid_config():
    with pytest.raises(ValueError):
        FeatureConfig(window=(1, 2))
    with pytest.raises(ValueError):
        FeatureConfig(old_epoch_weight=1.5)


def test_palindrome_window_symmetry():
    words = ["a", "b", "c", "b", "a"]
    vecs = extract(sent(*words), Resources(), NO_RESOURCES)
    n = len(words)
    for i in range(n):
        for k in (1, 2):
            left = [name for name in vecs[i] if name.startswith("w[{}]=".format(-k))]
            right = [name for name in vecs[n - 1 - i] if name.startswith("w[{}]=".format(k))]
            swap = {"<s>": "</s>", "</s>": "<s>"}
            lv = left[0].split("=", 1)[1]
            rv = right[0].split("=", 1)[1]
            assert swap.get(lv, lv) == rv


@given(st.lists(st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\t\n\r"),
                        min_size=1, max_size=5).filter(lambda w: w.strip() == w and w),
                min_size=1, max_size=5))
def test_names_free_of_whitespace_and_pure(words):
    s = sent(*words)
    a = extract(s, Resources(), NO_RESOURCES)
    assert a == extract(s, Resources(), NO_RESOURCES)
    for vec in a:
        assert all(not any(c.isspace() for c in k) for k in vec)
        assert all(v != 0 for v in vec.values())


def test_feature_dump():
    s = sent("hi", labels=["O"])
    out = io.StringIO()
    write_feature_dump(s, extract(s, Resources(), NO_RESOURCES), out)
    line = out.getvalue().splitlines()[0]
    token, label, feats = line.split("\t")
    assert (token, label) == ("hi", "O")
    assert "w=hi=1.0" in feats.split(" ")
