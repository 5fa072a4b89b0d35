"""Builders shared across test modules."""

from __future__ import annotations

import random

from mwekit.model import (
    Corpus,
    MweInstance,
    MweType,
    Sentence,
    Token,
)

LEMMA_POOL = (
    "pick", "up", "give", "a", "try", "break", "heart", "stand", "for",
    "the", "dog", "run", "of", "at", "least", "real", "estate", "and",
)

SOURCE_POOL = ("gold", "predicted", "ann-a", "ann-b", "consistency-added")


def tok(i, surface, lemma=None, upos=None, head=None, deprel=None) -> Token:
    return Token(index=i, surface=surface, lemma=lemma, upos=upos, head=head, deprel=deprel)


def sent(sid, words, mwes=(), flags=()) -> Sentence:
    """Sentence from "surface" or "surface/lemma" word specs."""
    tokens = []
    for i, spec in enumerate(words, start=1):
        if isinstance(spec, Token):
            tokens.append(spec)
            continue
        surface, _, lemma = spec.partition("/")
        tokens.append(tok(i, surface, lemma=lemma or surface.lower()))
    return Sentence(id=sid, tokens=tuple(tokens), mwes=tuple(mwes), flags=frozenset(flags))


def mwe(*indices, mwe_type=None, source="gold") -> MweInstance:
    return MweInstance(token_indices=tuple(indices), mwe_type=mwe_type, source=source)


def random_sentence(rng: random.Random, sid: str, *, max_tokens=12, with_parse=False,
                    varied_sources=False, with_types=False, max_mwes=3,
                    always_lemmas=False) -> Sentence:
    n = rng.randint(1, max_tokens)
    tokens = []
    for i in range(1, n + 1):
        lemma = rng.choice(LEMMA_POOL)
        surface = lemma.capitalize() if rng.random() < 0.2 else lemma
        head = None
        upos = None
        deprel = None
        if with_parse:
            head = rng.choice([h for h in range(0, n + 1) if h != i])
            upos = rng.choice(("NOUN", "VERB", "ADP", "ADV", "DET", "PRON"))
            deprel = rng.choice(("nsubj", "obj", "det", "case", "root", "acl"))
        if not always_lemmas and rng.random() < 0.1:
            lemma = None  # unlemmatized token
        tokens.append(Token(index=i, surface=surface, lemma=lemma, upos=upos,
                            head=head, deprel=deprel))
    mwes = []
    if n >= 2:
        for _ in range(rng.randint(0, max_mwes)):
            size = rng.randint(2, min(4, n))
            indices = tuple(sorted(rng.sample(range(1, n + 1), size)))
            source = rng.choice(SOURCE_POOL) if varied_sources else "gold"
            mwe_type = rng.choice(tuple(MweType)) if with_types and rng.random() < 0.7 else None
            mwes.append(MweInstance(indices, mwe_type=mwe_type, source=source))
    flags = frozenset({"unclear"}) if rng.random() < 0.15 else frozenset()
    return Sentence(id=sid, tokens=tuple(tokens), mwes=tuple(mwes), flags=flags)


def random_corpus(rng: random.Random, *, max_sentences=10, max_tokens=12,
                  with_parse=False, varied_sources=False, with_types=False,
                  always_lemmas=False, metadata=None) -> Corpus:
    n = rng.randint(1, max_sentences)
    sentences = tuple(
        random_sentence(rng, f"s{i}", max_tokens=max_tokens, with_parse=with_parse,
                        varied_sources=varied_sources, with_types=with_types,
                        always_lemmas=always_lemmas)
        for i in range(1, n + 1)
    )
    if metadata is None:
        metadata = {"source": rng.choice(("News", "Commentary", "TED", "UD"))} if rng.random() < 0.5 else {}
    return Corpus(sentences, metadata)


def random_gold_pred(rng: random.Random, *, max_sentences=10, max_tokens=12) -> tuple[Corpus, Corpus]:
    """A gold corpus and a prediction corpus over the same sentences.

    Predictions share roughly half of the gold instances and add noise,
    so intersections, misses, and spurious hits all occur.
    """
    gold = random_corpus(rng, max_sentences=max_sentences, max_tokens=max_tokens,
                         with_types=True, always_lemmas=True)
    pred_sentences = []
    for s in gold.sentences:
        kept = [MweInstance(m.token_indices, source="predicted")
                for m in s.mwes if rng.random() < 0.5]
        n = len(s.tokens)
        if n >= 2:
            for _ in range(rng.randint(0, 2)):
                size = rng.randint(2, min(4, n))
                indices = tuple(sorted(rng.sample(range(1, n + 1), size)))
                kept.append(MweInstance(indices, source="predicted"))
        pred_sentences.append(s.with_mwes(kept))
    return gold, Corpus(tuple(pred_sentences), dict(gold.metadata))
