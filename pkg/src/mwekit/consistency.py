"""Annotation-consistency audit.

Mines every labeled MWE into a set of lemma keys, re-runs the rule-based
identifier with that set as the lexicon, and surfaces spans that match a
mined key but carry no label. A human accepts or rejects each candidate;
accepted ones become instances with source "consistency-added". The audit
only ever adds labels, existing positive labels are taken as correct.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .errors import StaleCandidate
from .identify import MatchConfig, OverlapPolicy, identify
from .lexicon import Lexicon, LexiconEntry
from .model import (
    CONSISTENCY_SOURCE,
    PREDICTED_SOURCE,
    Corpus,
    MweInstance,
    lemma_sequence,
    multiset_key,
)


class CandidateStatus(enum.Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass(frozen=True)
class MinedEntry:
    """One labeled lemma sequence with its first occurrence as exemplar."""

    lemmas: tuple[str, ...]
    exemplar_sentence_id: str
    exemplar_indices: tuple[int, ...]

    @property
    def entry_id(self) -> str:
        return "_".join(self.lemmas)


@dataclass(frozen=True)
class MinedSet:
    """All labeled lemma keys of a corpus, queryable by multiset alias."""

    entries: tuple[MinedEntry, ...]

    def to_lexicon(self) -> Lexicon:
        return Lexicon(LexiconEntry(e.lemmas) for e in self.entries)

    def entry_for_multiset(self, lemmas) -> MinedEntry | None:
        key = multiset_key(lemmas)
        for e in self.entries:
            if multiset_key(e.lemmas) == key:
                return e
        return None

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ConsistencyCandidate:
    """An unlabeled span that mirrors an already-labeled MWE."""

    sentence_id: str
    token_indices: tuple[int, ...]
    matched_entry: str
    exemplar: tuple[str, tuple[int, ...]]
    status: CandidateStatus = CandidateStatus.PENDING

    @property
    def candidate_id(self) -> str:
        return f"{self.sentence_id}:{'-'.join(str(i) for i in self.token_indices)}"


def mine_labeled_set(c: Corpus) -> MinedSet:
    """Collect one entry per distinct labeled lemma sequence.

    Instances with source "predicted" are not labels and are skipped. The
    exemplar is the first occurrence in corpus order.
    """
    entries: dict[tuple[str, ...], MinedEntry] = {}
    for s in c.sentences:
        for m in s.mwes:
            if m.source == PREDICTED_SOURCE:
                continue
            lemmas = lemma_sequence(m, s)
            if lemmas not in entries:
                entries[lemmas] = MinedEntry(lemmas, s.id, m.token_indices)
    return MinedSet(tuple(entries.values()))


def find_candidates(
    c: Corpus, mined: MinedSet, cfg: MatchConfig = MatchConfig()
) -> list[ConsistencyCandidate]:
    """Spans matching a mined key that are not themselves labeled.

    Matching always includes the multiset alias (so rearranged occurrences
    surface) and never suppresses overlaps; ``cfg`` contributes the gap
    bound. Order is by sentence, then span, for reproducible review.
    """
    if not mined.entries:
        return []
    lexicon = mined.to_lexicon()
    audit_cfg = replace(cfg, allow_reorder=True, overlap_policy=OverlapPolicy.ALL)
    candidates = []
    for s in c.sentences:
        labeled = {m.token_indices for m in s.mwes if m.source != PREDICTED_SOURCE}
        for match in identify(s, lexicon, audit_cfg):
            if match.token_indices in labeled:
                continue
            entry = mined.entry_for_multiset(lemma_sequence(match, s))
            candidates.append(ConsistencyCandidate(
                sentence_id=s.id,
                token_indices=match.token_indices,
                matched_entry=entry.entry_id,
                exemplar=(entry.exemplar_sentence_id, entry.exemplar_indices),
            ))
    return candidates


def apply_decisions(
    c: Corpus, decisions: list[tuple[ConsistencyCandidate, CandidateStatus]]
) -> Corpus:
    """Add an instance for every accepted candidate; rejected ones are no-ops.

    Re-applying the same decisions is harmless (instances deduplicate).
    Raises StaleCandidate when a candidate no longer fits the corpus: its
    sentence is gone, its indices are out of range, or the span's lemmas
    no longer match the mined entry.
    """
    additions: dict[str, list[MweInstance]] = {}
    for candidate, status in decisions:
        if status is not CandidateStatus.ACCEPTED:
            continue
        try:
            s = c.sentence(candidate.sentence_id)
        except KeyError:
            raise StaleCandidate(
                f"sentence {candidate.sentence_id!r} is not in the corpus"
            ) from None
        if candidate.token_indices[-1] > len(s.tokens):
            raise StaleCandidate(
                f"indices {candidate.token_indices} out of range in {s.id!r}"
            )
        instance = MweInstance(candidate.token_indices, source=CONSISTENCY_SOURCE)
        span_key = multiset_key(lemma_sequence(instance, s))
        entry_key = multiset_key(candidate.matched_entry.split("_"))
        if span_key != entry_key:
            raise StaleCandidate(
                f"span {candidate.token_indices} in {s.id!r} no longer realizes "
                f"{candidate.matched_entry}"
            )
        additions.setdefault(s.id, []).append(instance)

    if not additions:
        return c

    def add(s):
        extra = additions.get(s.id)
        if not extra:
            return s
        return s.with_mwes(tuple(s.mwes) + tuple(extra))

    return c.map_sentences(add)
