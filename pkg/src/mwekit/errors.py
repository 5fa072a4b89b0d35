"""Exception types shared across the toolkit."""

from __future__ import annotations


class MwekitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(MwekitError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class FormatError(MwekitError):
    """Data cannot be represented in the requested output format."""


class MissingLemma(MwekitError):
    """An operation that needs lemmas met a token without one."""


class MissingParse(MwekitError):
    """An operation that needs UPOS/dependency fields met a token without them."""


class MalformedTree(MwekitError):
    """Dependency head links contain a cycle."""


class CorpusMismatch(MwekitError):
    """Two corpora that must cover the same sentences do not."""


class StaleCandidate(MwekitError):
    """A consistency candidate no longer matches the current corpus content."""
