"""
Reading, validating and writing CoNLL-style BIO token streams.

Columns are tab-separated, in the fixed order token / optional POS /
optional label, with a blank line between sentences.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, TextIO

logger = logging.getLogger(__name__)

DEFAULT_TYPES = (
    "company", "facility", "geo-loc", "movie", "musicartist",
    "other", "person", "product", "sportsteam", "tvshow",
)


class CorpusError(ValueError):
    """Malformed corpus input. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line {}: {}".format(line, message)
        super().__init__(message)
        self.line = line


class BIOError(CorpusError):
    pass


@dataclass(frozen=True)
class Token:
    text: str
    pos: Optional[str] = None

    def __post_init__(self):
        if not self.text:
            raise CorpusError("empty token")
        if "\t" in self.text or "\n" in self.text or "\r" in self.text:
            raise CorpusError("token contains tab or newline: {!r}".format(self.text))


@dataclass
class Sentence:
    tokens: list
    labels: Optional[list] = None
    weight: float = 1.0
    epoch: Optional[str] = None

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.tokens):
            raise CorpusError("{} labels for {} tokens".format(
                len(self.labels), len(self.tokens)))
        if not self.weight > 0:
            raise CorpusError("sentence weight must be positive, got {}".format(self.weight))

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self):
        return [t.text for t in self.tokens]

    @property
    def tags(self):
        return [t.pos for t in self.tokens]


@dataclass(frozen=True)
class LabelScheme:
    """Entity types plus the derived label alphabet O, B-t, I-t, ..."""

    types: tuple = DEFAULT_TYPES
    labels: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        types = tuple(self.types)
        if not types:
            raise ValueError("label scheme needs at least one entity type")
        if len(set(types)) != len(types):
            raise ValueError("duplicate entity types in scheme: {}".format(types))
        object.__setattr__(self, "types", types)
        labels = ["O"]
        for t in types:
            labels.extend(("B-" + t, "I-" + t))
        object.__setattr__(self, "labels", tuple(labels))

    @classmethod
    def from_labels(cls, labels):
        """Build a scheme from a label inventory, preserving first-seen type order."""
        types = []
        for label in labels:
            if label == "O":
                continue
            t = split_label(label)[1]
            if t not in types:
                types.append(t)
        return cls(tuple(types))

    def index(self, label):
        return self.labels.index(label)

    def __contains__(self, label):
        return label in self.labels

    def __len__(self):
        return len(self.labels)


def split_label(label):
    """'B-geo-loc' -> ('B', 'geo-loc'); 'O' -> ('O', None)."""
    if label == "O":
        return "O", None
    prefix, sep, etype = label.partition("-")
    if not sep or prefix not in ("B", "I") or not etype:
        raise CorpusError("not a BIO label: {!r}".format(label))
    return prefix, etype


def bio_violation(labels):
    """Index of the first I-t not continuing a B-t/I-t run, or None."""
    prev_type = None
    for i, label in enumerate(labels):
        prefix, etype = split_label(label)
        if prefix == "I" and etype != prev_type:
            return i
        prev_type = etype
    return None


def repair_bio(labels: Sequence[str]) -> list:
    """Rewrite every orphaned I-t to B-t; everything else is left alone."""
    out = []
    prev_type = None
    for label in labels:
        prefix, etype = split_label(label)
        if prefix == "I" and etype != prev_type:
            label = "B-" + etype
        out.append(label)
        prev_type = etype
    return out


def _finish(tokens, labels, first_line, has_labels, repair, epoch, validate):
    if has_labels and validate:
        bad = bio_violation(labels)
        if bad is not None:
            if not repair:
                raise BIOError("{} at token {} does not continue an entity of the same type"
                               " (use repair_bio)".format(labels[bad], bad + 1),
                               line=first_line + bad)
            labels = repair_bio(labels)
    return Sentence(tokens, labels if has_labels else None, epoch=epoch)


def iter_conll(stream: TextIO, scheme: LabelScheme = LabelScheme(), has_labels=True,
               pos_column=False, unknown="error", repair=False,
               epoch=None, validate=True) -> Iterator[Sentence]:
    """Lazily parse sentences from a CoNLL stream; see read_conll."""
    ncols = 1 + int(pos_column) + int(has_labels)
    tokens, labels = [], []
    first_line = None
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            if tokens:
                yield _finish(tokens, labels, first_line, has_labels, repair, epoch, validate)
                tokens, labels = [], []
            continue
        cols = line.split("\t")
        if len(cols) != ncols:
            raise CorpusError("expected {} tab-separated columns, found {}".format(
                ncols, len(cols)), line=lineno)
        try:
            token = Token(cols[0], cols[1] if pos_column else None)
        except CorpusError as e:
            raise CorpusError(str(e), line=lineno) from None
        if has_labels:
            label = cols[-1]
            if validate and label not in scheme:
                if unknown == "O":
                    logger.warning("line %d: unknown label %r coerced to O", lineno, label)
                    label = "O"
                else:
                    raise CorpusError("unknown label {!r}".format(label), line=lineno)
            labels.append(label)
        if not tokens:
            first_line = lineno
        tokens.append(token)
    if tokens:
        yield _finish(tokens, labels, first_line, has_labels, repair, epoch, validate)


def read_conll(stream: TextIO, scheme: LabelScheme = LabelScheme(), has_labels=True,
               pos_column=False, unknown="error", repair=False, epoch=None,
               validate=True) -> list:
    """
    Read every sentence from `stream`.

    unknown="O" coerces labels outside the scheme to O instead of failing;
    repair=True runs repair_bio on each sentence instead of rejecting
    invalid I- transitions. `epoch` is attached to every sentence read.
    validate=False keeps the label column verbatim, with no checks at all.
    """
    if unknown not in ("error", "O"):
        raise ValueError("unknown must be 'error' or 'O'")
    return list(iter_conll(stream, scheme, has_labels, pos_column, unknown, repair, epoch,
                           validate))


def write_conll(sentences: Iterable[Sentence], stream: TextIO, labels_column=True) -> None:
    """Write sentences back out. POS is written whenever every token has one."""
    first = True
    for i, sent in enumerate(sentences):
        if labels_column and sent.labels is None:
            raise CorpusError("sentence {} has no labels to write".format(i))
        if not first:
            stream.write("\n")
        first = False
        with_pos = all(t.pos is not None for t in sent.tokens)
        for j, tok in enumerate(sent.tokens):
            cols = [tok.text]
            if with_pos:
                cols.append(tok.pos)
            if labels_column:
                cols.append(sent.labels[j])
            stream.write("\t".join(cols) + "\n")


def detect_columns(lines: Iterable[str]) -> int:
    """Column count of the first non-blank line, 0 for empty input."""
    for line in lines:
        if line.strip():
            return len(line.rstrip("\r\n").split("\t"))
    return 0
