"""Exact-match entity scoring (precision / recall / F1), typed or with types collapsed."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .corpus import BIOError, Sentence, bio_violation, split_label

NOTYPES_TYPE = "entity"


class EntitySpan(NamedTuple):
    type: str
    start: int
    end: int


class TypeScore(NamedTuple):
    precision: float
    recall: float
    f1: float
    gold_count: int
    pred_count: int
    correct_count: int


@dataclass
class EvalReport:
    per_type: dict
    overall: TypeScore
    mode: str

    @property
    def precision(self):
        return self.overall.precision

    @property
    def recall(self):
        return self.overall.recall

    @property
    def f1(self):
        return self.overall.f1


def spans_from_bio(labels: Sequence[str]) -> set:
    bad = bio_violation(labels)
    if bad is not None:
        raise BIOError("invalid BIO at position {} ({}); run repair_bio first".format(bad, labels[bad]))
    spans = set()
    start = etype = None
    for i, label in enumerate(list(labels) + ["O"]):
        prefix, t = split_label(label)
        if prefix != "I" and etype is not None:
            spans.add(EntitySpan(etype, start, i))
            etype = None
        if prefix == "B":
            start, etype = i, t
    return spans


def prf(gold, pred, correct) -> TypeScore:
    p = 100.0 * correct / pred if pred else 0.0
    r = 100.0 * correct / gold if gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return TypeScore(p, r, f, gold, pred, correct)


def score(gold: Sequence[Sentence], pred: Sequence[Sentence], mode: str = "typed") -> EvalReport:
    if mode not in ("typed", "notypes"):
        raise ValueError("mode must be 'typed' or 'notypes'")
    if len(gold) != len(pred):
        raise ValueError("gold has {} sentences but prediction has {}".format(len(gold), len(pred)))
    counts = {}
    for idx, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p) or g.labels is None or p.labels is None:
            raise ValueError("sentence {} is misaligned or unlabeled".format(idx))
        if g.words != p.words:
            raise ValueError("sentence {}: gold and prediction tokens differ".format(idx))
        gs, ps = spans_from_bio(g.labels), spans_from_bio(p.labels)
        if mode == "notypes":
            gs = {s._replace(type=NOTYPES_TYPE) for s in gs}
            ps = {s._replace(type=NOTYPES_TYPE) for s in ps}
        for s in gs:
            counts.setdefault(s.type, [0, 0, 0])[0] += 1
        for s in ps:
            counts.setdefault(s.type, [0, 0, 0])[1] += 1
        for s in gs & ps:
            counts[s.type][2] += 1
    per_type = {t: prf(*counts[t]) for t in sorted(counts)}
    totals = [sum(c[k] for c in counts.values()) for k in range(3)]
    return EvalReport(per_type, prf(*totals), mode)


def render_table(typed: EvalReport, notypes: EvalReport = None) -> str:
    """Aligned text table: per-type rows, Overall, and optionally No types."""
    width = max([len("Entity type"), len("No types")] + [len(t) for t in typed.per_type])
    line = "{:>%d}  {:>6}  {:>6}  {:>6}\n" % width
    out = [line.format("Entity type", "P", "R", "F1")]
    fmt = lambda name, s: line.format(name, "%.2f" % s.precision, "%.2f" % s.recall, "%.2f" % s.f1)
    for t, s in typed.per_type.items():
        out.append(fmt(t, s))
    out.append(fmt("Overall", typed.overall))
    if notypes is not None:
        out.append(fmt("No types", notypes.overall))
    return "".join(out)


def render_kv(report: EvalReport) -> str:
    """Machine-readable dump, one `key=value` metric per line."""
    out = ["mode={}".format(report.mode)]
    rows = list(report.per_type.items()) + [("overall", report.overall)]
    for name, s in rows:
        for field in TypeScore._fields:
            value = getattr(s, field)
            out.append("{}.{}={}".format(name, field,
                                         "%.2f" % value if isinstance(value, float) else value))
    return "\n".join(out) + "\n"
