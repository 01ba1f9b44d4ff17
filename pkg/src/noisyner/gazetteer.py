"""
Typed entity lists compiled into case-insensitive longest-match token tries.

Each source (one list file) gets its own trie, so matches from different
sources may overlap freely while matches within a source never do. Alias
lists are kept apart from name lists by suffixing their source with
``_alias``.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence, TextIO

logger = logging.getLogger(__name__)

_END = None  # trie key marking a complete entry
AGNOSTIC = ("-", "*", "")


@dataclass(frozen=True)
class GazetteerEntry:
    tokens: tuple
    source: str
    alias: bool = False

    def __post_init__(self):
        if not self.tokens or any(not t for t in self.tokens):
            raise ValueError("gazetteer entry has an empty token: {!r}".format(self.tokens))
        object.__setattr__(self, "tokens", tuple(t.casefold() for t in self.tokens))

    @property
    def feature_source(self):
        return self.source + "_alias" if self.alias else self.source


def load_gazetteer(stream: TextIO, source: str, alias: bool = False) -> set:
    """One entry per line, whitespace-tokenized and case-folded. Blank lines are skipped."""
    if not source or any(c.isspace() for c in source):
        raise ValueError("gazetteer source must be non-empty without whitespace: {!r}".format(source))
    entries = set()
    for line in stream:
        toks = tuple(t.casefold() for t in line.split())
        if toks:
            entries.add(GazetteerEntry(toks, source, alias))
    if not entries:
        logger.warning("gazetteer %s has no entries", source)
    return entries


def freebase_type_map() -> dict:
    """Freebase type -> NE type, as shipped in data/freebase_types.tsv."""
    text = resources.files("noisyner").joinpath("data/freebase_types.tsv").read_text("utf-8")
    out = {}
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            fb, ne = line.split("\t")
            out[fb] = ne
    return out


class GazetteerCatalog:
    """
    A set of gazetteer sources, each compiled to a token trie.

    type_map maps a feature source to its entity type, or to None for
    type-agnostic lists such as trigger words.
    """

    def __init__(self, entries: Iterable[GazetteerEntry] = (), type_map: Optional[dict] = None):
        self.type_map = dict(type_map or {})
        self.tries = {}
        self.entries = {}
        for e in entries:
            self.add(e)

    def add(self, entry: GazetteerEntry):
        src = entry.feature_source
        self.type_map.setdefault(src, None)
        self.entries.setdefault(src, set()).add(entry)
        node = self.tries.setdefault(src, {})
        for tok in entry.tokens:
            node = node.setdefault(tok, {})
        node[_END] = True

    @property
    def sources(self):
        return sorted(self.tries)

    def _longest(self, trie, folded, start):
        node = trie
        best = 0
        for k in range(start, len(folded)):
            node = node.get(folded[k])
            if node is None:
                break
            if _END in node:
                best = k - start + 1
        return best

    def spans(self, tokens: Sequence[str]) -> dict:
        """Greedy left-to-right longest matches: {source: [(start, end), ...]}."""
        folded = [t.casefold() for t in tokens]
        out = {}
        for src in self.sources:
            trie = self.tries[src]
            found = []
            i = 0
            while i < len(folded):
                n = self._longest(trie, folded, i)
                if n:
                    found.append((i, i + n))
                    i += n
                else:
                    i += 1
            if found:
                out[src] = found
        return out

    def __len__(self):
        return sum(len(v) for v in self.entries.values())


def match_tokens(catalog: GazetteerCatalog, tokens: Sequence[str]) -> list:
    """Per-token set of `in_gaz=<source>` feature names."""
    feats = [set() for _ in tokens]
    for src, spans in catalog.spans(tokens).items():
        name = "in_gaz=" + src
        for start, end in spans:
            for k in range(start, end):
                feats[k].add(name)
    return feats


def _parse_alias(value, lineno):
    v = value.strip().lower()
    if v in ("alias", "1", "true", "yes", "y"):
        return True
    if v in ("name", "0", "false", "no", "n", ""):
        return False
    raise ValueError("manifest line {}: alias column must be alias/name or a boolean, got {!r}"
                     .format(lineno, value))


def load_manifest(path) -> GazetteerCatalog:
    """
    Load a catalog from a manifest of `source<TAB>path<TAB>alias?<TAB>ne_type` lines.

    Relative list paths resolve against the manifest's directory; an
    ne_type of '-' declares a type-agnostic list.
    """
    base = os.path.dirname(os.path.abspath(path))
    catalog = GazetteerCatalog()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (3, 4):
                raise ValueError("manifest line {}: expected source, path, alias, ne_type".format(lineno))
            source, list_path, alias = cols[0], cols[1], _parse_alias(cols[2], lineno)
            ne_type = cols[3].strip() if len(cols) == 4 else ""
            list_path = os.path.join(base, list_path)
            with open(list_path, encoding="utf-8") as lf:
                entries = load_gazetteer(lf, source, alias)
            for e in entries:
                catalog.add(e)
            feature_source = source + "_alias" if alias else source
            catalog.type_map[feature_source] = None if ne_type in AGNOSTIC else ne_type
    return catalog
