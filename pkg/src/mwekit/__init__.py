"""mwekit: tools for multiword-expression corpus work.

Core pieces: an immutable corpus model, a tab-separated corpus format,
lexicon-driven identification of (possibly discontinuous, overlapping)
MWEs, dependency-based type tagging, exact-match evaluation with recall
breakdowns, a consistency audit, and an annotation web service.
"""

from .errors import (
    CorpusMismatch,
    FormatError,
    MalformedTree,
    MissingLemma,
    MissingParse,
    MwekitError,
    ParseError,
    StaleCandidate,
)
from .model import (
    Corpus,
    MweInstance,
    MweType,
    Sentence,
    Token,
    is_discontinuous,
    lemma_multiset,
    lemma_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CorpusMismatch",
    "FormatError",
    "MalformedTree",
    "MissingLemma",
    "MissingParse",
    "MweInstance",
    "MweType",
    "MwekitError",
    "ParseError",
    "Sentence",
    "StaleCandidate",
    "Token",
    "is_discontinuous",
    "lemma_multiset",
    "lemma_sequence",
    "__version__",
]
