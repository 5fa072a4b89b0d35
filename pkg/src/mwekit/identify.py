"""Rule-based MWE identification against a lexicon.

Scans each sentence for token groups, possibly discontinuous, whose lemma
sequence (or lemma multiset, when reordering is allowed) equals a lexicon
entry. A match may skip at most ``max_gap`` non-member tokens inside its
span, so "Pick me up" matches pick_up with one skipped token.
"""

from __future__ import annotations

import enum
import itertools
import unicodedata
from dataclasses import dataclass, replace

from .errors import MissingLemma
from .lexicon import Lexicon, LexiconEntry
from .model import (
    PREDICTED_SOURCE,
    Corpus,
    MweInstance,
    Sentence,
    multiset_key,
)


class OverlapPolicy(enum.Enum):
    ALL = "all"
    LONGEST_NON_OVERLAPPING = "longest"


@dataclass(frozen=True)
class MatchConfig:
    """Matching knobs.

    max_gap: maximum number of non-member tokens inside a match span.
    allow_reorder: match the lemma multiset instead of the ordered sequence.
    overlap_policy: keep all matches, or greedily suppress overlaps
        (earlier start wins, then the longer entry).
    """

    max_gap: int = 3
    allow_reorder: bool = False
    overlap_policy: OverlapPolicy = OverlapPolicy.ALL

    def __post_init__(self):
        if self.max_gap < 0:
            raise ValueError(f"max_gap must be >= 0, got {self.max_gap}")


def _folded_lemmas(s: Sentence) -> list[str]:
    lemmas = []
    for token in s.tokens:
        if token.lemma is None:
            raise MissingLemma(
                f"sentence {s.id!r}: token {token.index} ({token.surface!r}) has no lemma"
            )
        lemmas.append(unicodedata.normalize("NFC", token.lemma.lower()))
    return lemmas


def _ordered_matches(lemmas: list[str], entry: LexiconEntry, start: int, max_gap: int):
    """Yield index tuples (0-based) matching ``entry`` left to right from ``start``."""
    length = len(entry.lemmas)
    last_allowed = min(len(lemmas) - 1, start + length - 1 + max_gap)

    def extend(chosen: list[int], pos: int):
        if pos == length:
            yield tuple(chosen)
            return
        for j in range(chosen[-1] + 1, last_allowed + 2 - (length - pos)):
            if lemmas[j] == entry.lemmas[pos]:
                chosen.append(j)
                yield from extend(chosen, pos + 1)
                chosen.pop()

    yield from extend([start], 1)


def _reordered_matches(lemmas: list[str], lex: Lexicon, start: int, length: int, max_gap: int):
    """Yield index tuples whose lemma multiset hits the lexicon, min index = start."""
    if lemmas[start] not in lex.vocabulary:
        return
    last_allowed = min(len(lemmas) - 1, start + length - 1 + max_gap)
    pool = [j for j in range(start + 1, last_allowed + 1) if lemmas[j] in lex.vocabulary]
    for combo in itertools.combinations(pool, length - 1):
        indices = (start,) + combo
        key = multiset_key(lemmas[j] for j in indices)
        if lex.entries_for_multiset(key):
            yield indices


def identify(s: Sentence, lex: Lexicon, cfg: MatchConfig = MatchConfig()) -> list[MweInstance]:
    """All lexicon matches in one sentence, sorted by first token index.

    Every returned instance's lemma sequence (or multiset) equals a lexicon
    entry and its internal gap is at most ``cfg.max_gap``. Instances carry
    source "predicted". Raises MissingLemma if a token lacks a lemma.
    """
    lemmas = _folded_lemmas(s)
    found: dict[tuple[int, ...], MweInstance] = {}

    for start in range(len(lemmas)):
        if cfg.allow_reorder:
            for length in lex.entry_lengths:
                for indices in _reordered_matches(lemmas, lex, start, length, cfg.max_gap):
                    _record(found, indices)
        else:
            for entry in lex.entries_with_first(lemmas[start]):
                for indices in _ordered_matches(lemmas, entry, start, cfg.max_gap):
                    _record(found, indices)

    matches = sorted(found.values(), key=lambda m: m.token_indices)
    if cfg.overlap_policy is OverlapPolicy.LONGEST_NON_OVERLAPPING:
        matches = _suppress_overlaps(matches)
    return matches


def _record(found: dict, zero_based: tuple[int, ...]) -> None:
    indices = tuple(j + 1 for j in zero_based)
    if indices not in found:
        found[indices] = MweInstance(token_indices=indices, source=PREDICTED_SOURCE)


def _suppress_overlaps(matches: list[MweInstance]) -> list[MweInstance]:
    """Greedy selection: earlier start wins, then the longer match."""
    picked: list[MweInstance] = []
    used: set[int] = set()
    order = sorted(matches, key=lambda m: (m.token_indices[0], -len(m.token_indices), m.token_indices))
    for m in order:
        if used.isdisjoint(m.token_indices):
            picked.append(m)
            used.update(m.token_indices)
    picked.sort(key=lambda m: m.token_indices)
    return picked


def identify_corpus(
    c: Corpus, lex: Lexicon, cfg: MatchConfig = MatchConfig(), *, replace_mwes: bool = False
) -> Corpus:
    """Run identify over every sentence and attach the predictions.

    With ``replace_mwes`` the predictions replace all existing annotations;
    otherwise they are added next to them. Per-sentence lemma failures are
    aggregated into one MissingLemma error.
    """
    new_sentences = []
    failures = []
    for s in c.sentences:
        try:
            predictions = identify(s, lex, cfg)
        except MissingLemma as exc:
            failures.append(str(exc))
            continue
        base = () if replace_mwes else s.mwes
        new_sentences.append(s.with_mwes(tuple(base) + tuple(predictions)))
    if failures:
        raise MissingLemma("; ".join(failures))
    return replace(c, sentences=tuple(new_sentences))
