"""The word-per-line exchange format for sequence-to-sequence MWE tagging.

The model input is the sentence as one word per line. The expected output is
two tab-separated columns: the word echoed back, and its MWE tag (empty, or
MWE numbers joined by ';' when the word belongs to several MWEs). Model
output is untrusted, so parsing repairs what it can and reports the rest as
line diagnostics instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .errors import FormatError
from .model import MweInstance, PREDICTED_SOURCE, Sentence

SYSTEM_PROMPT = "You are a helpful system to identify multiple-word expressions (MWEs)."

_PROMPT_TEMPLATE = (
    "Identify all the MWEs in the given sentence, and output their surface forms "
    "and the indices of their components.\n"
    "\n"
    "{definition}\n"
    "\n"
    "Each sentence is given as a string of words delimited by '\\n'. Respond in "
    "TSV format, where the first and second columns contain words and MWE tags, "
    "respectively. The MWE tag should be a string of MWE identifiers. When a word "
    "belongs to multiple MWEs, the tag should be a concatenation of their numbers "
    "delimited by semicolons.\n"
    "\n"
    "Sentence:\n"
    "{words}"
)

DEFINITIONS = ("long", "short")


def definition_text(kind: str = "long") -> str:
    """The shipped MWE definition, 'long' or 'short'."""
    if kind not in DEFINITIONS:
        raise ValueError(f"unknown definition: {kind!r} (expected one of {DEFINITIONS})")
    path = resources.files("mwekit.assets") / f"mwe_definition_{kind}.txt"
    return path.read_text(encoding="utf-8").rstrip("\n")


def to_llm_input(s: Sentence) -> str:
    """One surface form per line, original order.

    Words containing a tab or newline cannot be represented; FormatError.
    """
    for token in s.tokens:
        if "\t" in token.surface or "\n" in token.surface:
            raise FormatError(
                f"sentence {s.id!r}: token {token.index} contains a tab or newline"
            )
    return "\n".join(t.surface for t in s.tokens)


def build_prompt(s: Sentence, definition: str = "long") -> str:
    """Full instruction prompt for one sentence, ending with its word lines."""
    return _PROMPT_TEMPLATE.format(
        definition=definition_text(definition),
        words=to_llm_input(s),
    )


def to_llm_output(s: Sentence) -> str:
    """Reference output for a sentence: word, tab, its MWE numbers.

    Numbering follows the stored instance order (first-token order), the
    same rule the column format uses.
    """
    to_llm_input(s)  # reuse the representability check
    tags: dict[int, list[str]] = {t.index: [] for t in s.tokens}
    for num, m in enumerate(s.mwes, start=1):
        for idx in m.token_indices:
            tags[idx].append(str(num))
    return "\n".join(
        f"{t.surface}\t{';'.join(tags[t.index])}" for t in s.tokens
    )


@dataclass(frozen=True)
class LineDiagnostic:
    """A recoverable problem in one line of model output."""

    line: int
    text: str
    reason: str


def parse_llm_output(text: str, s: Sentence) -> tuple[list[MweInstance], list[LineDiagnostic]]:
    """Group tagged lines back into MWE instances.

    Lines with the wrong shape, a wrong echoed word, or junk tags yield
    diagnostics and are otherwise ignored. Tag numbers that end up on a
    single line are dropped with a diagnostic (an MWE needs two words).
    """
    lines = text.splitlines()
    diagnostics: list[LineDiagnostic] = []
    groups: dict[int, list[int]] = {}

    for lineno, line in enumerate(lines, start=1):
        if lineno > len(s.tokens):
            diagnostics.append(LineDiagnostic(lineno, line, "extra line beyond sentence end"))
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            diagnostics.append(LineDiagnostic(
                lineno, line, f"expected 2 tab-separated columns, got {len(parts)}"
            ))
            continue
        word, tag = parts
        expected = s.token(lineno).surface
        if word != expected:
            diagnostics.append(LineDiagnostic(
                lineno, line, f"word {word!r} does not echo {expected!r}"
            ))
            continue
        if not tag.strip():
            continue
        for part in tag.split(";"):
            part = part.strip()
            if not part:
                continue
            if not part.isdigit():
                diagnostics.append(LineDiagnostic(lineno, line, f"bad MWE tag part: {part!r}"))
                continue
            num = int(part)
            indices = groups.setdefault(num, [])
            if lineno not in indices:
                indices.append(lineno)

    if len(lines) < len(s.tokens):
        diagnostics.append(LineDiagnostic(
            len(lines) + 1, "",
            f"output has {len(lines)} lines for {len(s.tokens)} words",
        ))

    seen: set[tuple[int, ...]] = set()
    instances = []
    for num in sorted(groups):
        indices = groups[num]
        if len(indices) < 2:
            diagnostics.append(LineDiagnostic(
                indices[0], lines[indices[0] - 1],
                f"tag {num} appears on a single line; dropped",
            ))
            continue
        key = tuple(indices)
        if key in seen:
            continue
        seen.add(key)
        instances.append(MweInstance(key, source=PREDICTED_SOURCE))
    instances.sort(key=lambda m: m.token_indices)
    return instances, diagnostics
