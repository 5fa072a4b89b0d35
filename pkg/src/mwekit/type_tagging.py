"""Assign MWE types from dependency structure.

An MWE's head w* is the member that has every other member among its
descendants in the dependency tree. The type follows the PoS of w*:
nominal heads give Noun (unless a verbal relative-clause member hangs off
the head, which gives Verb), verbal heads give Clause when their nominal
subject is inside the MWE and Verb otherwise, modifier/connective PoS give
Mod/Conn, and anything else, including "no head inside the MWE", gives
Other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import MalformedTree, MissingParse
from .model import Corpus, MweInstance, MweType, Sentence

_NOMINAL = frozenset({"NOUN", "PRON", "PROPN"})
_VERBAL = frozenset({"VERB", "AUX"})
_MOD_CONN = frozenset({"ADP", "ADJ", "ADV", "CCONJ", "SCONJ"})
_SUBJECT_DEPRELS = ("nsubj", "nsubj:pass")
_RELCL_DEPRELS = ("acl:relcl", "acl")


@dataclass(frozen=True)
class DepView:
    """Per-sentence dependency arrays with derived descendant sets."""

    sentence: Sentence
    heads: tuple[int, ...]
    deprels: tuple[str | None, ...]
    upos: tuple[str | None, ...]
    children: tuple[tuple[int, ...], ...]
    descendants: tuple[frozenset[int], ...]
    roots: tuple[int, ...]

    @classmethod
    def from_sentence(cls, s: Sentence) -> "DepView":
        """Build the view; raises MissingParse on absent heads and
        MalformedTree when head links cycle."""
        heads = []
        for token in s.tokens:
            if token.head is None:
                raise MissingParse(
                    f"sentence {s.id!r}: token {token.index} has no dependency head"
                )
            heads.append(token.head)
        n = len(heads)
        child_lists: list[list[int]] = [[] for _ in range(n + 1)]
        roots = []
        for idx, head in enumerate(heads, start=1):
            if head == 0:
                roots.append(idx)
            else:
                child_lists[head].append(idx)

        # Walk down from the roots; anything unreached sits on a cycle.
        # Each token has exactly one head, so the reachable part is a forest.
        order: list[int] = []
        stack = list(roots)
        while stack:
            idx = stack.pop()
            order.append(idx)
            stack.extend(child_lists[idx])
        if len(order) != n:
            stranded = sorted(set(range(1, n + 1)) - set(order))
            raise MalformedTree(
                f"sentence {s.id!r}: head links cycle through tokens {stranded}"
            )
        descendants: list[frozenset[int]] = [frozenset()] * (n + 1)
        for idx in reversed(order):  # children come after their parent in order
            acc: set[int] = set()
            for child in child_lists[idx]:
                acc.add(child)
                acc |= descendants[child]
            descendants[idx] = frozenset(acc)

        return cls(
            sentence=s,
            heads=tuple(heads),
            deprels=tuple(t.deprel for t in s.tokens),
            upos=tuple(t.upos for t in s.tokens),
            children=tuple(tuple(c) for c in child_lists[1:]),
            descendants=tuple(descendants[1:]),
            roots=tuple(roots),
        )

    def upos_of(self, index: int) -> str | None:
        return self.upos[index - 1]

    def deprel_of(self, index: int) -> str | None:
        return self.deprels[index - 1]

    def children_of(self, index: int) -> tuple[int, ...]:
        return self.children[index - 1]

    def descendants_of(self, index: int) -> frozenset[int]:
        return self.descendants[index - 1]


def find_head(m: MweInstance, d: DepView) -> int | None:
    """The member dominating all other members, or None.

    At most one member can dominate the rest in a well-formed tree, so the
    result is unique when present.
    """
    members = set(m.token_indices)
    for idx in m.token_indices:
        if members - {idx} <= d.descendants_of(idx):
            return idx
    return None


def tag_type(m: MweInstance, d: DepView) -> MweType:
    """Classify one MWE by the PoS of its head."""
    head = find_head(m, d)
    if head is None:
        return MweType.OTHER
    pos = d.upos_of(head)
    if pos is None:
        raise MissingParse(
            f"sentence {d.sentence.id!r}: token {head} has no UPOS tag"
        )
    members = set(m.token_indices)
    if pos in _NOMINAL:
        if _has_relative_clause_member(head, members, d):
            return MweType.VERB
        return MweType.NOUN
    if pos in _VERBAL:
        if _has_subject_member(head, members, d):
            return MweType.CLAUSE
        return MweType.VERB
    if pos in _MOD_CONN:
        return MweType.MOD_CONN
    return MweType.OTHER


def _has_relative_clause_member(head: int, members: set[int], d: DepView) -> bool:
    for child in d.children_of(head):
        if child in members and d.upos_of(child) == "VERB" and d.deprel_of(child) in _RELCL_DEPRELS:
            return True
    return False


def _has_subject_member(head: int, members: set[int], d: DepView) -> bool:
    for child in d.children_of(head):
        if child in members and d.deprel_of(child) in _SUBJECT_DEPRELS:
            return True
    return False


@dataclass(frozen=True)
class TagDiagnostic:
    sentence_id: str
    reason: str


def tag_sentence(s: Sentence, *, force: bool = False) -> tuple[Sentence, list[TagDiagnostic]]:
    """Fill in missing types on one sentence; never raises.

    Already-typed instances are kept unless ``force``. Sentences without a
    usable parse (missing heads or UPOS, cycles, several roots) get Other
    plus a diagnostic rather than an error.
    """
    if not s.mwes:
        return s, []
    diagnostics: list[TagDiagnostic] = []
    view: DepView | None = None
    try:
        view = DepView.from_sentence(s)
        if len(view.roots) != 1:
            diagnostics.append(TagDiagnostic(s.id, f"{len(view.roots)} roots; tagged Other"))
            view = None
    except (MissingParse, MalformedTree) as exc:
        diagnostics.append(TagDiagnostic(s.id, str(exc)))

    tagged = []
    for m in s.mwes:
        if m.mwe_type is not None and not force:
            tagged.append(m)
            continue
        if view is None:
            tagged.append(replace(m, mwe_type=MweType.OTHER))
            continue
        try:
            tagged.append(replace(m, mwe_type=tag_type(m, view)))
        except MissingParse as exc:
            diagnostics.append(TagDiagnostic(s.id, str(exc)))
            tagged.append(replace(m, mwe_type=MweType.OTHER))
    return s.with_mwes(tagged), diagnostics


def tag_corpus(c: Corpus, *, force: bool = False) -> tuple[Corpus, list[TagDiagnostic]]:
    """Apply tag_sentence to every sentence, aggregating diagnostics."""
    sentences = []
    diagnostics: list[TagDiagnostic] = []
    for s in c.sentences:
        tagged, diags = tag_sentence(s, force=force)
        sentences.append(tagged)
        diagnostics.extend(diags)
    return replace(c, sentences=tuple(sentences)), diagnostics
