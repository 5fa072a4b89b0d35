"""Reading and writing the tab-separated corpus column format.

The canonical layout has 7 columns per token row:

    ID  FORM  LEMMA  UPOS  HEAD  DEPREL  MWE

Sentences are separated by blank lines; comment lines start with '#'.
Recognized comments:

    # global.columns = ID FORM ...      column layout (written on every file)
    # corpus.<key> = <value>            corpus-level metadata
    # sent_id = <id>                    sentence id
    # flag = <flag>                     sentence flag, e.g. "unclear"
    # mwe_source = 1=predicted;...      provenance of non-gold instances

The MWE column holds '*' (no membership) or a ';'-joined list of per-sentence
MWE numbers; the first row of an instance may carry a type suffix, e.g.
'1:VERB' or '1:VERB;2'. Files in the 11-column CoNLL-U-plus layout (with a
trailing PARSEME:MWE column) are accepted by the compatibility reader, which
ignores the extra columns and skips multiword-token ranges and empty nodes.
"""

from __future__ import annotations

import io
from typing import Iterable, TextIO

from .errors import FormatError, ParseError
from .model import (
    GOLD_SOURCE,
    Corpus,
    MweInstance,
    MweType,
    Sentence,
    Token,
)

CORE_COLUMNS = ("ID", "FORM", "LEMMA", "UPOS", "HEAD", "DEPREL", "MWE")
CUPT11_COLUMNS = (
    "ID", "FORM", "LEMMA", "UPOS", "XPOS", "FEATS",
    "HEAD", "DEPREL", "DEPS", "MISC", "PARSEME:MWE",
)
EMPTY = "_"
NO_MWE = "*"


def _column_map(names: tuple[str, ...], line: int) -> dict[str, int]:
    positions = {name: i for i, name in enumerate(names)}
    if "PARSEME:MWE" in positions and "MWE" not in positions:
        positions["MWE"] = positions["PARSEME:MWE"]
    for required in ("ID", "FORM", "MWE"):
        if required not in positions:
            raise ParseError(line, f"column layout lacks {required}: {' '.join(names)}")
    return positions


class _SentenceBuilder:
    """Accumulates comment and token lines for one sentence block."""

    def __init__(self):
        self.sent_id: str | None = None
        self.flags: list[str] = []
        self.source_map: dict[int, str] = {}
        self.rows: list[tuple[int, list[str]]] = []  # (lineno, fields)

    def empty(self) -> bool:
        return self.sent_id is None and not self.flags and not self.rows


def _parse_comment(text: str, line: int, builder: _SentenceBuilder, metadata: dict) -> None:
    body = text[1:].strip()
    if "=" not in body:
        return  # free-form comment, ignored
    key, _, value = body.partition("=")
    key = key.strip()
    value = value.strip()
    if key == "sent_id":
        builder.sent_id = value
    elif key == "flag":
        builder.flags.append(value)
    elif key == "mwe_source":
        for item in value.split(";"):
            num, _, source = item.partition("=")
            try:
                builder.source_map[int(num)] = source
            except ValueError:
                raise ParseError(line, f"bad mwe_source entry: {item!r}") from None
    elif key.startswith("corpus."):
        metadata[key[len("corpus."):]] = value
    # global.columns is handled by the caller; anything else is ignored


def _parse_mwe_cell(cell: str, line: int, *, strict_types: bool) -> list[tuple[int, MweType | None]]:
    if cell in (NO_MWE, EMPTY):
        return []
    memberships = []
    for part in cell.split(";"):
        num_text, _, type_text = part.partition(":")
        try:
            num = int(num_text)
        except ValueError:
            raise ParseError(line, f"bad MWE cell entry: {part!r}") from None
        mwe_type = None
        if type_text:
            try:
                mwe_type = MweType.parse(type_text)
            except ValueError:
                if strict_types:
                    raise ParseError(line, f"unknown MWE type: {type_text!r}") from None
        memberships.append((num, mwe_type))
    return memberships


def _finish_sentence(
    builder: _SentenceBuilder,
    columns: dict[str, int],
    *,
    strict_types: bool,
    ordinal: int,
) -> Sentence:
    tokens: list[Token] = []
    memberships: dict[int, list[int]] = {}
    types: dict[int, MweType] = {}
    head_checks: list[tuple[int, int, int]] = []  # (lineno, token index, head)

    def col(fields: list[str], name: str) -> str | None:
        pos = columns.get(name)
        if pos is None:
            return None
        return fields[pos]

    for lineno, fields in builder.rows:
        id_text = fields[columns["ID"]]
        try:
            index = int(id_text)
        except ValueError:
            raise ParseError(lineno, f"non-numeric token id: {id_text!r}") from None
        expected = len(tokens) + 1
        if index != expected:
            raise ParseError(lineno, f"expected token id {expected}, got {index}")

        lemma = col(fields, "LEMMA")
        upos = col(fields, "UPOS")
        deprel = col(fields, "DEPREL")
        head_text = col(fields, "HEAD")
        head: int | None = None
        if head_text is not None and head_text != EMPTY:
            try:
                head = int(head_text)
            except ValueError:
                raise ParseError(lineno, f"non-numeric head: {head_text!r}") from None
            if head < 0 or head == index:
                raise ParseError(lineno, f"head {head} invalid for token {index}")
            head_checks.append((lineno, index, head))
        try:
            tokens.append(Token(
                index=index,
                surface=fields[columns["FORM"]],
                lemma=None if lemma in (None, EMPTY) else lemma,
                upos=None if upos in (None, EMPTY) else upos,
                head=head,
                deprel=None if deprel in (None, EMPTY) else deprel,
            ))
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None

        for num, mwe_type in _parse_mwe_cell(fields[columns["MWE"]], lineno, strict_types=strict_types):
            memberships.setdefault(num, []).append(index)
            if mwe_type is not None:
                if num in types and types[num] != mwe_type:
                    raise ParseError(lineno, f"conflicting types for MWE {num}")
                types[num] = mwe_type

    for lineno, index, head in head_checks:
        if head > len(tokens):
            raise ParseError(lineno, f"head {head} of token {index} out of range")

    mwes = []
    for num in sorted(memberships):
        indices = memberships[num]
        if len(indices) < 2:
            last_line = builder.rows[-1][0]
            raise ParseError(last_line, f"MWE {num} appears on a single token row")
        mwes.append(MweInstance(
            token_indices=tuple(indices),
            mwe_type=types.get(num),
            source=builder.source_map.get(num, GOLD_SOURCE),
        ))

    sent_id = builder.sent_id if builder.sent_id is not None else str(ordinal)
    try:
        return Sentence(id=sent_id, tokens=tuple(tokens), mwes=tuple(mwes),
                        flags=frozenset(builder.flags))
    except ValueError as exc:
        raise ParseError(builder.rows[-1][0], str(exc)) from None


def read_cupt(source: Iterable[str] | TextIO, columns: str = "auto") -> Corpus:
    """Parse a corpus from a line iterable or text stream.

    ``columns`` is "auto" (detect 7 vs 11 columns, honoring any
    ``# global.columns`` header), "core7", or "cupt11".
    """
    if columns not in ("auto", "core7", "cupt11"):
        raise ValueError(f"unknown column mode: {columns!r}")
    layout: dict[str, int] | None = None
    strict_types = True
    skip_subtokens = False
    if columns == "core7":
        layout = _column_map(CORE_COLUMNS, 0)
    elif columns == "cupt11":
        layout = _column_map(CUPT11_COLUMNS, 0)
        strict_types = False
        skip_subtokens = True

    metadata: dict = {}
    sentences: list[Sentence] = []
    builder = _SentenceBuilder()

    def flush():
        nonlocal builder
        if builder.rows:
            sentences.append(_finish_sentence(
                builder, layout, strict_types=strict_types, ordinal=len(sentences) + 1
            ))
        elif not builder.empty():
            raise ParseError(lineno, "sentence block without token rows")
        builder = _SentenceBuilder()

    lineno = 0
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("global.columns"):
                _, _, decl = body.partition("=")
                declared = tuple(decl.split())
                new_layout = _column_map(declared, lineno)
                if layout is not None and new_layout != layout and builder.rows:
                    raise ParseError(lineno, "column layout changed mid-file")
                layout = new_layout
                strict_types = "PARSEME:MWE" not in declared
                skip_subtokens = "PARSEME:MWE" in declared
            else:
                _parse_comment(line, lineno, builder, metadata)
            continue
        fields = line.split("\t")
        if layout is None:  # auto mode without a global.columns header
            if len(fields) == len(CORE_COLUMNS):
                layout = _column_map(CORE_COLUMNS, lineno)
            elif len(fields) == len(CUPT11_COLUMNS):
                layout = _column_map(CUPT11_COLUMNS, lineno)
                strict_types = False
                skip_subtokens = True
            else:
                raise ParseError(lineno, f"expected 7 or 11 columns, got {len(fields)}")
        expected_count = max(layout.values()) + 1
        if len(fields) != expected_count:
            raise ParseError(lineno, f"expected {expected_count} columns, got {len(fields)}")
        id_text = fields[layout["ID"]]
        if skip_subtokens and ("-" in id_text or "." in id_text):
            continue
        builder.rows.append((lineno, fields))
    flush()
    return Corpus(tuple(sentences), metadata)


def reads_cupt(text: str, columns: str = "auto") -> Corpus:
    """Parse a corpus from a string."""
    return read_cupt(io.StringIO(text), columns=columns)


def _format_field(value: str | None, what: str) -> str:
    if value is None:
        return EMPTY
    if value == EMPTY:
        raise FormatError(f"{what} {EMPTY!r} cannot be told apart from a missing value")
    if "\t" in value or "\n" in value:
        raise FormatError(f"{what} contains a tab or newline: {value!r}")
    return value


def write_cupt(corpus: Corpus, out: TextIO) -> None:
    """Write a corpus in the canonical 7-column layout.

    Instances are numbered per sentence in order of first token; reading the
    result back yields a corpus equal to the input, field for field.
    """
    out.write("# global.columns = " + " ".join(CORE_COLUMNS) + "\n")
    for key, value in corpus.metadata.items():
        if "\n" in key or "\n" in value or "=" in key:
            raise FormatError(f"metadata entry not representable: {key!r}")
        out.write(f"# corpus.{key} = {value}\n")
    for sentence in corpus.sentences:
        _write_sentence(sentence, out)


def _write_sentence(sentence: Sentence, out: TextIO) -> None:
    if not sentence.tokens:
        raise FormatError(f"sentence {sentence.id!r} has no tokens; not representable")
    if "\n" in sentence.id:
        raise FormatError(f"sentence id contains a newline: {sentence.id!r}")
    out.write(f"# sent_id = {sentence.id}\n")
    for flag in sorted(sentence.flags):
        out.write(f"# flag = {flag}\n")

    # Sentence stores instances in canonical (first token) order already.
    numbered = list(enumerate(sentence.mwes, start=1))
    non_gold = [(num, m.source) for num, m in numbered if m.source != GOLD_SOURCE]
    if non_gold:
        joined = ";".join(f"{num}={source}" for num, source in non_gold)
        out.write(f"# mwe_source = {joined}\n")

    cells: dict[int, list[str]] = {t.index: [] for t in sentence.tokens}
    for num, m in numbered:
        first = m.token_indices[0]
        for idx in m.token_indices:
            if idx == first and m.mwe_type is not None:
                cells[idx].append(f"{num}:{m.mwe_type.value}")
            else:
                cells[idx].append(str(num))

    for token in sentence.tokens:
        mwe_cell = ";".join(cells[token.index]) or NO_MWE
        row = (
            str(token.index),
            _format_field(token.surface, "surface"),
            _format_field(token.lemma, "lemma"),
            token.upos or EMPTY,
            EMPTY if token.head is None else str(token.head),
            _format_field(token.deprel, "deprel"),
            mwe_cell,
        )
        out.write("\t".join(row) + "\n")
    out.write("\n")


def dumps_cupt(corpus: Corpus) -> str:
    """Serialize a corpus to a string."""
    buf = io.StringIO()
    write_cupt(corpus, buf)
    return buf.getvalue()
