"""Exact-match MWE scoring, recall breakdowns, agreement, corpus statistics.

An MWE is identified by its sentence id plus its set of token indices; two
MWEs match iff both are identical. Precision, recall, and F1 are plain set
arithmetic over those keys. Recall breakdowns partition the gold MWEs
(by type, continuity, lexicon membership, or seen/unseen against a training
corpus) and report recall inside each bucket.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import CorpusMismatch
from .lexicon import Lexicon
from .model import (
    Corpus,
    MweInstance,
    MweType,
    Sentence,
    is_discontinuous,
    lemma_multiset,
    multiset_key,
)

TYPE_ORDER = (MweType.NOUN, MweType.VERB, MweType.MOD_CONN, MweType.CLAUSE, MweType.OTHER)
UNTYPED = "Untyped"

PARTITIONS = ("type", "continuity", "seen", "in-lexicon")


@dataclass(frozen=True, order=True)
class MweKey:
    """Identity of one MWE for exact matching."""

    sentence_id: str
    token_indices: tuple[int, ...]


def mwe_keys(c: Corpus) -> set[MweKey]:
    return {
        MweKey(s.id, m.token_indices)
        for s in c.sentences
        for m in s.mwes
    }


def _check_same_sentences(a: Corpus, b: Corpus) -> None:
    ids_a, ids_b = set(a.sentence_ids()), set(b.sentence_ids())
    if ids_a != ids_b:
        only_a = sorted(ids_a - ids_b)[:5]
        only_b = sorted(ids_b - ids_a)[:5]
        raise CorpusMismatch(
            f"sentence id sets differ (gold only: {only_a}, pred only: {only_b})"
        )


@dataclass(frozen=True)
class CategoryRecall:
    """Recall within one gold category; recall is None when the category is empty."""

    category: str
    n_gold: int
    n_matched: int

    @property
    def recall(self) -> float | None:
        if self.n_gold == 0:
            return None
        return self.n_matched / self.n_gold


@dataclass(frozen=True)
class EvalReport:
    """Exact-match counts with derived P/R/F1 and optional recall breakdowns."""

    n_gold: int
    n_pred: int
    n_matched: int
    breakdowns: Mapping[str, tuple[CategoryRecall, ...]] = field(default_factory=dict)

    @property
    def precision(self) -> float:
        # An empty prediction set makes no false claims, so precision is 1.
        if self.n_pred == 0:
            return 1.0
        return self.n_matched / self.n_pred

    @property
    def recall(self) -> float:
        if self.n_gold == 0:
            return 1.0
        return self.n_matched / self.n_gold

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        if p + r == 0:
            return 0.0
        return 2 * p * r / (p + r)


def score(gold: Corpus, pred: Corpus) -> EvalReport:
    """Exact-match P/R/F1 of ``pred`` against ``gold``.

    Both corpora must cover the same sentence ids.
    """
    _check_same_sentences(gold, pred)
    g, h = mwe_keys(gold), mwe_keys(pred)
    return EvalReport(n_gold=len(g), n_pred=len(h), n_matched=len(g & h))


def _gold_category(
    m: MweInstance,
    s: Sentence,
    partition: str,
    lexicon: Lexicon | None,
    train_multisets: frozenset | None,
) -> str:
    if partition == "type":
        return m.mwe_type.label if m.mwe_type is not None else UNTYPED
    if partition == "continuity":
        return "Discontinuous" if is_discontinuous(m) else "Continuous"
    if partition == "seen":
        key = multiset_key(lemma_multiset(m, s))
        return "Seen" if key in train_multisets else "Unseen"
    if partition == "in-lexicon":
        return "In lexicon" if lexicon.contains_multiset(lemma_multiset(m, s).elements()) else "Not in lexicon"
    raise ValueError(f"unknown partition: {partition!r}")


def _category_order(partition: str, present: list[str]) -> list[str]:
    fixed = {
        "type": [t.label for t in TYPE_ORDER] + [UNTYPED],
        "continuity": ["Continuous", "Discontinuous"],
        "seen": ["Seen", "Unseen"],
        "in-lexicon": ["In lexicon", "Not in lexicon"],
    }[partition]
    if partition == "type" and UNTYPED not in present:
        fixed = fixed[:-1]
    return fixed


def recall_breakdown(
    gold: Corpus,
    pred: Corpus,
    partition: str,
    *,
    lexicon: Lexicon | None = None,
    train: Corpus | None = None,
) -> tuple[CategoryRecall, ...]:
    """Recall of ``pred`` within each gold category of ``partition``.

    ``partition`` is one of "type", "continuity", "seen" (needs ``train``),
    or "in-lexicon" (needs ``lexicon``). Categories are breakdowns of the
    gold set only; spurious predictions have no gold category.
    """
    if partition not in PARTITIONS:
        raise ValueError(f"unknown partition: {partition!r} (expected one of {PARTITIONS})")
    if partition == "seen" and train is None:
        raise ValueError("the seen/unseen partition needs a training corpus")
    if partition == "in-lexicon" and lexicon is None:
        raise ValueError("the in-lexicon partition needs a lexicon")
    _check_same_sentences(gold, pred)

    train_multisets = None
    if train is not None:
        train_multisets = frozenset(
            multiset_key(lemma_multiset(m, s))
            for s in train.sentences
            for m in s.mwes
        )

    matched = mwe_keys(gold) & mwe_keys(pred)
    gold_count: dict[str, int] = {}
    match_count: dict[str, int] = {}
    for s in gold.sentences:
        for m in s.mwes:
            category = _gold_category(m, s, partition, lexicon, train_multisets)
            gold_count[category] = gold_count.get(category, 0) + 1
            if MweKey(s.id, m.token_indices) in matched:
                match_count[category] = match_count.get(category, 0) + 1

    order = _category_order(partition, list(gold_count))
    return tuple(
        CategoryRecall(c, gold_count.get(c, 0), match_count.get(c, 0))
        for c in order
    )


def full_report(
    gold: Corpus,
    pred: Corpus,
    *,
    lexicon: Lexicon | None = None,
    train: Corpus | None = None,
) -> EvalReport:
    """score() plus every breakdown whose inputs are available."""
    base = score(gold, pred)
    breakdowns: dict[str, tuple[CategoryRecall, ...]] = {
        "type": recall_breakdown(gold, pred, "type"),
        "continuity": recall_breakdown(gold, pred, "continuity"),
    }
    if train is not None:
        breakdowns["seen"] = recall_breakdown(gold, pred, "seen", train=train)
    if lexicon is not None:
        breakdowns["in-lexicon"] = recall_breakdown(gold, pred, "in-lexicon", lexicon=lexicon)
    return EvalReport(base.n_gold, base.n_pred, base.n_matched, breakdowns)


@dataclass(frozen=True)
class IaaReport:
    """Pairwise exact-match F1 between annotators."""

    annotators: tuple[str, ...]
    pairwise: tuple[tuple[float, ...], ...]

    @property
    def pair_scores(self) -> list[float]:
        n = len(self.annotators)
        return [self.pairwise[i][j] for i in range(n) for j in range(i + 1, n)]

    @property
    def mean(self) -> float:
        scores = self.pair_scores
        return sum(scores) / len(scores)

    @property
    def max(self) -> float:
        return max(self.pair_scores)


def iaa(annotations: Sequence[Corpus], names: Sequence[str] | None = None) -> IaaReport:
    """Inter-annotator agreement as pairwise exact-match F1.

    Needs at least two corpora over the same sentence ids. F1 is symmetric
    in its two arguments, so the matrix is symmetric with unit diagonal.
    """
    if len(annotations) < 2:
        raise ValueError("agreement needs at least two annotators")
    for other in annotations[1:]:
        _check_same_sentences(annotations[0], other)
    if names is None:
        names = [
            c.metadata.get("annotator", f"A{i + 1}")
            for i, c in enumerate(annotations)
        ]
    n = len(annotations)
    matrix = [[1.0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        f1 = score(annotations[i], annotations[j]).f1
        matrix[i][j] = matrix[j][i] = f1
    return IaaReport(tuple(names), tuple(tuple(row) for row in matrix))


@dataclass(frozen=True)
class CorpusStats:
    """Raw corpus counts; ratios are derived properties."""

    n_sentences: int
    n_words: int
    n_mwes: int
    n_mwe_tokens: int
    type_counts: Mapping[str, int]
    discontinuous_counts: Mapping[str, int]
    n_discontinuous: int

    @property
    def density(self) -> float:
        """Share of token positions belonging to at least one MWE."""
        if self.n_words == 0:
            return 0.0
        return self.n_mwe_tokens / self.n_words

    @property
    def type_proportions(self) -> dict[str, float]:
        """Share of each type among typed MWEs; untyped ones are excluded."""
        typed = {t: n for t, n in self.type_counts.items() if t != UNTYPED}
        total = sum(typed.values())
        if total == 0:
            return {}
        return {t: n / total for t, n in typed.items()}

    @property
    def discontinuity_by_type(self) -> dict[str, float | None]:
        return {
            t: (self.discontinuous_counts.get(t, 0) / n if n else None)
            for t, n in self.type_counts.items()
        }


def stats(c: Corpus) -> CorpusStats:
    """Sentence/word/MWE counts, density, and per-type discontinuity.

    A token shared by several MWEs counts once toward density. Type
    proportions are over typed MWEs; untyped ones appear in their own
    bucket only if present.
    """
    n_words = 0
    n_mwes = 0
    n_mwe_tokens = 0
    n_discontinuous = 0
    type_counts: dict[str, int] = {t.label: 0 for t in TYPE_ORDER}
    discontinuous_counts: dict[str, int] = {t.label: 0 for t in TYPE_ORDER}
    for s in c.sentences:
        n_words += len(s.tokens)
        covered: set[int] = set()
        for m in s.mwes:
            n_mwes += 1
            covered.update(m.token_indices)
            label = m.mwe_type.label if m.mwe_type is not None else UNTYPED
            type_counts[label] = type_counts.get(label, 0) + 1
            if is_discontinuous(m):
                n_discontinuous += 1
                discontinuous_counts[label] = discontinuous_counts.get(label, 0) + 1
        n_mwe_tokens += len(covered)
    return CorpusStats(
        n_sentences=len(c.sentences),
        n_words=n_words,
        n_mwes=n_mwes,
        n_mwe_tokens=n_mwe_tokens,
        type_counts=type_counts,
        discontinuous_counts=discontinuous_counts,
        n_discontinuous=n_discontinuous,
    )


def merge_stats(reports: Sequence[CorpusStats]) -> CorpusStats:
    """Combine per-corpus statistics by adding counts."""
    type_counts: dict[str, int] = {}
    discontinuous_counts: dict[str, int] = {}
    for r in reports:
        for t, n in r.type_counts.items():
            type_counts[t] = type_counts.get(t, 0) + n
        for t, n in r.discontinuous_counts.items():
            discontinuous_counts[t] = discontinuous_counts.get(t, 0) + n
    return CorpusStats(
        n_sentences=sum(r.n_sentences for r in reports),
        n_words=sum(r.n_words for r in reports),
        n_mwes=sum(r.n_mwes for r in reports),
        n_mwe_tokens=sum(r.n_mwe_tokens for r in reports),
        type_counts=type_counts,
        discontinuous_counts=discontinuous_counts,
        n_discontinuous=sum(r.n_discontinuous for r in reports),
    )
