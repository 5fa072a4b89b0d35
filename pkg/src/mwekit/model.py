"""Core corpus types: tokens, MWE instances, sentences, corpora.

A sentence holds a token sequence plus a list of MWE instances, where each
instance is a set of 1-based token indices. Instances may overlap and may be
discontinuous. All types are immutable value objects; operations that "modify"
a corpus build a new one.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace

from .errors import MissingLemma

#: Universal POS tags (UPOS), the only values allowed in Token.upos.
UPOS_TAGS = frozenset(
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART PRON PROPN PUNCT SCONJ SYM VERB X".split()
)

#: Default provenance tag for instances read from a corpus file.
GOLD_SOURCE = "gold"
#: Provenance tag for instances produced by the rule-based identifier.
PREDICTED_SOURCE = "predicted"
#: Provenance tag for instances added by the consistency audit.
CONSISTENCY_SOURCE = "consistency-added"


class MweType(enum.Enum):
    """Syntactic type of an MWE, derived from the PoS of its head."""

    NOUN = "NOUN"
    VERB = "VERB"
    MOD_CONN = "MODCONN"
    CLAUSE = "CLAUSE"
    OTHER = "OTHER"

    @property
    def label(self) -> str:
        """Human-readable name used in reports."""
        return _TYPE_LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "MweType":
        key = text.strip().upper().replace("/", "").replace("_", "").replace("-", "")
        try:
            return _TYPE_ALIASES[key]
        except KeyError:
            raise ValueError(f"unknown MWE type: {text!r}") from None


_TYPE_LABELS = {
    MweType.NOUN: "Noun",
    MweType.VERB: "Verb",
    MweType.MOD_CONN: "Mod/Conn",
    MweType.CLAUSE: "Clause",
    MweType.OTHER: "Other",
}

_TYPE_ALIASES = {
    "NOUN": MweType.NOUN,
    "VERB": MweType.VERB,
    "MODCONN": MweType.MOD_CONN,
    "CLAUSE": MweType.CLAUSE,
    "OTHER": MweType.OTHER,
}


@dataclass(frozen=True)
class Token:
    """One surface word. ``index`` is its 1-based position in the sentence.

    ``head`` is the 1-based index of the dependency head, 0 for the root,
    or None when no parse is available.
    """

    index: int
    surface: str
    lemma: str | None = None
    upos: str | None = None
    head: int | None = None
    deprel: str | None = None

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.upos is not None and self.upos not in UPOS_TAGS:
            raise ValueError(f"not a UPOS tag: {self.upos!r}")
        if self.head is not None:
            if self.head < 0:
                raise ValueError(f"head must be >= 0, got {self.head}")
            if self.head == self.index:
                raise ValueError(f"token {self.index} cannot head itself")


@dataclass(frozen=True)
class MweInstance:
    """One MWE: a set of >= 2 token indices within a single sentence.

    Indices are normalized to strictly increasing order at construction, so
    rearranged surface order ("heart ... break") canonicalizes to the same
    instance. ``source`` records provenance: gold, predicted, an annotator id,
    or consistency-added.
    """

    token_indices: tuple[int, ...]
    mwe_type: MweType | None = None
    source: str = GOLD_SOURCE

    def __post_init__(self):
        canonical = tuple(sorted(set(self.token_indices)))
        object.__setattr__(self, "token_indices", canonical)
        if len(canonical) < 2:
            raise ValueError(f"an MWE needs at least two tokens, got {canonical}")
        if canonical[0] < 1:
            raise ValueError(f"token indices must be >= 1, got {canonical}")

    @property
    def span(self) -> tuple[int, int]:
        """(first, last) token index."""
        return self.token_indices[0], self.token_indices[-1]

    def key(self) -> tuple[int, ...]:
        return self.token_indices


def is_discontinuous(m: MweInstance) -> bool:
    """True iff the instance's token indices are not consecutive integers."""
    first, last = m.span
    return last - first + 1 != len(m.token_indices)


@dataclass(frozen=True)
class Sentence:
    """A token sequence with zero or more (possibly overlapping) MWEs.

    Token indices run 1..len(tokens). MWE instances are deduplicated per
    (source, token_indices) and stored in canonical order, so two sentences
    with the same annotations compare equal regardless of ingestion order.
    """

    id: str
    tokens: tuple[Token, ...]
    mwes: tuple[MweInstance, ...] = ()
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "flags", frozenset(self.flags))
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise ValueError(
                    f"sentence {self.id!r}: token at position {pos} has index {tok.index}"
                )
        n = len(self.tokens)
        for tok in self.tokens:
            if tok.head is not None and tok.head > n:
                raise ValueError(
                    f"sentence {self.id!r}: head {tok.head} of token {tok.index} out of range"
                )
        seen: set[tuple[str, tuple[int, ...]]] = set()
        kept = []
        for m in self.mwes:
            if m.token_indices[-1] > n:
                raise ValueError(
                    f"sentence {self.id!r}: MWE indices {m.token_indices} out of range"
                )
            dedup_key = (m.source, m.token_indices)
            if dedup_key in seen:
                continue
            seen.add(dedup_key)
            kept.append(m)
        kept.sort(key=lambda m: (m.token_indices, m.source))
        object.__setattr__(self, "mwes", tuple(kept))

    def token(self, index: int) -> Token:
        """Token by 1-based index."""
        return self.tokens[index - 1]

    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)

    def with_mwes(self, mwes) -> "Sentence":
        """Copy of this sentence with ``mwes`` replacing the current list."""
        return replace(self, mwes=tuple(mwes))


def lemma_sequence(m: MweInstance, s: Sentence) -> tuple[str, ...]:
    """Lowercase lemmas of the constituents in token-index order.

    Raises MissingLemma if any constituent lacks a lemma.
    """
    seq = []
    for i in m.token_indices:
        lemma = s.token(i).lemma
        if lemma is None:
            raise MissingLemma(
                f"sentence {s.id!r}: token {i} ({s.token(i).surface!r}) has no lemma"
            )
        seq.append(lemma.lower())
    return tuple(seq)


def lemma_multiset(m: MweInstance, s: Sentence) -> Counter:
    """Multiset of lowercase lemmas of the instance's constituent tokens."""
    return Counter(lemma_sequence(m, s))


def multiset_key(lemmas) -> tuple[str, ...]:
    """Canonical hashable key for a lemma multiset (sorted, with repeats)."""
    if isinstance(lemmas, Counter):
        return tuple(sorted(lemmas.elements()))
    return tuple(sorted(lemmas))


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of sentences with free-form text metadata."""

    sentences: tuple[Sentence, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        ids = [s.id for s in self.sentences]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate sentence ids: {dupes}")

    def __len__(self) -> int:
        return len(self.sentences)

    def sentence(self, sent_id: str) -> Sentence:
        for s in self.sentences:
            if s.id == sent_id:
                return s
        raise KeyError(sent_id)

    def sentence_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sentences)

    def map_sentences(self, fn) -> "Corpus":
        """New corpus with ``fn`` applied to every sentence."""
        return Corpus(tuple(fn(s) for s in self.sentences), dict(self.metadata))
