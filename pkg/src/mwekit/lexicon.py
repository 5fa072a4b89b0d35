"""MWE lexicon: load, index, and query multiword entries.

The file format is one entry per line, lemmas joined by underscores or
whitespace ("stand_for" or "stand for"); '#' starts a comment line. Entries
are case-folded and NFC-normalized on load. Lookup works on two keys: the
ordered lemma sequence, and the order-free lemma multiset (for rearranged
occurrences such as "heart ... break" realizing break_heart).
"""

from __future__ import annotations

import io
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .errors import ParseError
from .model import multiset_key

_SPLIT = re.compile(r"[_\s]+")


def _fold(lemma: str) -> str:
    return unicodedata.normalize("NFC", lemma.lower())


@dataclass(frozen=True)
class LexiconEntry:
    """An ordered sequence of two or more lowercase lemmas."""

    lemmas: tuple[str, ...]

    def __post_init__(self):
        if len(self.lemmas) < 2:
            raise ValueError(f"an entry needs at least two lemmas: {self.lemmas}")
        for lemma in self.lemmas:
            if not lemma or _SPLIT.search(lemma):
                raise ValueError(f"bad lemma in entry: {lemma!r}")

    @property
    def entry_id(self) -> str:
        return "_".join(self.lemmas)

    def multiset_key(self) -> tuple[str, ...]:
        return multiset_key(self.lemmas)


class Lexicon:
    """Immutable indexed set of lexicon entries."""

    def __init__(self, entries: Iterable[LexiconEntry]):
        unique: dict[tuple[str, ...], LexiconEntry] = {}
        for entry in entries:
            unique.setdefault(entry.lemmas, entry)
        self._entries = tuple(sorted(unique.values(), key=lambda e: e.lemmas))
        self._sequences = frozenset(e.lemmas for e in self._entries)
        by_first: dict[str, list[LexiconEntry]] = {}
        by_multiset: dict[tuple[str, ...], list[LexiconEntry]] = {}
        for entry in self._entries:
            by_first.setdefault(entry.lemmas[0], []).append(entry)
            by_multiset.setdefault(entry.multiset_key(), []).append(entry)
        self._by_first = {k: tuple(v) for k, v in by_first.items()}
        self._multisets = {k: tuple(v) for k, v in by_multiset.items()}
        self._vocabulary = frozenset(l for e in self._entries for l in e.lemmas)
        self._lengths = tuple(sorted({len(e.lemmas) for e in self._entries}))

    @property
    def entries(self) -> tuple[LexiconEntry, ...]:
        return self._entries

    @property
    def entry_lengths(self) -> tuple[int, ...]:
        return self._lengths

    @property
    def vocabulary(self) -> frozenset[str]:
        return self._vocabulary

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, lemmas) -> bool:
        return self.contains(lemmas)

    def contains(self, lemmas: Sequence[str] | Counter) -> bool:
        """Membership test.

        A Counter is matched order-free against entry multisets; a sequence
        is matched against ordered entry lemmas.
        """
        if isinstance(lemmas, Counter):
            return self.contains_multiset(lemmas.elements())
        return tuple(_fold(l) for l in lemmas) in self._sequences

    def contains_multiset(self, lemmas) -> bool:
        return multiset_key(tuple(_fold(l) for l in lemmas)) in self._multisets

    def entries_with_first(self, lemma: str) -> tuple[LexiconEntry, ...]:
        return self._by_first.get(lemma, ())

    def entries_for_multiset(self, key: tuple[str, ...]) -> tuple[LexiconEntry, ...]:
        return self._multisets.get(key, ())


def load_lexicon(source: Iterable[str] | TextIO) -> Lexicon:
    """Load a lexicon from a line iterable or text stream."""
    entries = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lemmas = tuple(_fold(part) for part in _SPLIT.split(line) if part)
        if len(lemmas) < 2:
            raise ParseError(lineno, f"entry has a single lemma: {line!r}")
        entries.append(LexiconEntry(lemmas))
    return Lexicon(entries)


def loads_lexicon(text: str) -> Lexicon:
    return load_lexicon(io.StringIO(text))


def write_lexicon(lexicon: Lexicon, out: TextIO) -> None:
    """Write one underscore-joined entry per line, sorted."""
    for entry in lexicon.entries:
        out.write(entry.entry_id + "\n")
