from __future__ import annotations

import random
import re

import pytest

from mwekit.errors import FormatError
from mwekit.llm_io import (
    SYSTEM_PROMPT,
    build_prompt,
    definition_text,
    parse_llm_output,
    to_llm_input,
    to_llm_output,
)
from mwekit.model import Sentence, Token

from .helpers import mwe, random_corpus, sent


def acl_sentence():
    return sent("s1", ["ACL/acl", "stands/stand", "for/for"], mwes=[mwe(2, 3)])


class TestInput:
    def test_one_word_per_line(self):
        assert to_llm_input(acl_sentence()) == "ACL\nstands\nfor"

    def test_empty_sentence(self):
        assert to_llm_input(Sentence("e", ())) == ""

    def test_tab_in_word_rejected(self):
        s = Sentence("t", (Token(1, "a\tb"),))
        with pytest.raises(FormatError):
            to_llm_input(s)


class TestPrompt:
    def test_long_and_short_differ_only_in_definition(self):
        s = acl_sentence()
        long_p = build_prompt(s, "long")
        short_p = build_prompt(s, "short")
        assert long_p.replace(definition_text("long"), "X") == \
            short_p.replace(definition_text("short"), "X")

    def test_ends_with_word_lines(self):
        s = acl_sentence()
        assert build_prompt(s).endswith("Sentence:\nACL\nstands\nfor")

    def test_definition_word_counts(self):
        # Counting word tokens (those containing a letter; the bare "1."
        # list numbers are not words).
        def words(text):
            return [w for w in text.split() if re.search(r"[A-Za-z]", w)]

        assert len(words(definition_text("long"))) == 162
        assert len(words(definition_text("short"))) == 57

    def test_definition_kind_validated(self):
        with pytest.raises(ValueError):
            build_prompt(acl_sentence(), "medium")

    def test_system_prompt_mentions_the_task(self):
        assert "MWE" in SYSTEM_PROMPT

    def test_tag_format_instruction_present(self):
        assert "delimited by semicolons" in build_prompt(acl_sentence())


class TestParse:
    def test_reference_example(self):
        instances, diags = parse_llm_output("ACL\t\nstands\t1\nfor\t1", acl_sentence())
        assert [m.token_indices for m in instances] == [(2, 3)]
        assert diags == []
        assert instances[0].source == "predicted"

    def test_all_tags_empty(self):
        instances, diags = parse_llm_output("ACL\t\nstands\t\nfor\t", acl_sentence())
        assert instances == [] and diags == []

    def test_single_line_tag_dropped_with_diagnostic(self):
        instances, diags = parse_llm_output("ACL\t\nstands\t1\nfor\t", acl_sentence())
        assert instances == []
        assert len(diags) == 1 and "single line" in diags[0].reason

    def test_wrong_shape_reported_not_fatal(self):
        instances, diags = parse_llm_output("ACL\nstands\t1\nfor\t1", acl_sentence())
        assert [m.token_indices for m in instances] == [(2, 3)]
        assert diags and diags[0].line == 1

    def test_word_echo_checked(self):
        instances, diags = parse_llm_output("ACL\t\nstand\t1\nfor\t1", acl_sentence())
        assert instances == []  # the broken line kills the group's second member
        assert any("echo" in d.reason for d in diags)

    def test_extra_lines_reported(self):
        _, diags = parse_llm_output("ACL\t\nstands\t\nfor\t\nbonus\t", acl_sentence())
        assert any("extra line" in d.reason for d in diags)

    def test_short_output_reported(self):
        _, diags = parse_llm_output("ACL\t", acl_sentence())
        assert any("3 words" in d.reason for d in diags)

    def test_junk_tag_reported_valid_parts_kept(self):
        instances, diags = parse_llm_output(
            "ACL\t\nstands\t1;x\nfor\t1", acl_sentence()
        )
        assert [m.token_indices for m in instances] == [(2, 3)]
        assert any("bad MWE tag" in d.reason for d in diags)

    def test_overlapping_tags(self):
        s = sent("s1", ["letting/let", "in/in", "and/and", "out/out"])
        instances, diags = parse_llm_output(
            "letting\t1;2\nin\t1\nand\t\nout\t2", s
        )
        assert [m.token_indices for m in instances] == [(1, 2), (1, 4)]
        assert diags == []


class TestGoldRoundTrip:
    def test_reference_serialization(self):
        assert to_llm_output(acl_sentence()) == "ACL\t\nstands\t1\nfor\t1"

    def test_random_sentences_recover_gold_exactly(self):
        rng = random.Random(29)
        for _ in range(200):
            c = random_corpus(rng, max_sentences=3)
            for s in c.sentences:
                instances, diags = parse_llm_output(to_llm_output(s), s)
                assert diags == []
                assert {m.token_indices for m in instances} == \
                    {m.token_indices for m in s.mwes}
