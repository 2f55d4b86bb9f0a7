import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from taxolm.errors import DataFormatError
from taxolm.prompts import (
    PromptTemplate,
    builtin_templates,
    load_templates,
    lookup,
    render,
    render_masked,
)
from taxolm.terminology import Term


class TestTemplateInvariants:
    def test_missing_hypernym_slot_rejected(self):
        with pytest.raises(DataFormatError):
            PromptTemplate("bad", "[X] is a thing")

    def test_duplicated_slot_rejected(self):
        with pytest.raises(DataFormatError):
            PromptTemplate("bad", "[X] and [X] are [Y]")
        with pytest.raises(DataFormatError):
            PromptTemplate("bad", "[X] is [Y] or [Y]")

    def test_with_period(self):
        t = lookup("type").with_period()
        assert t.pattern == "[X] is a type of [Y]."
        assert t.with_period().pattern == t.pattern


class TestRender:
    def test_type_prompt(self):
        assert render(lookup("type"), "physics", "science") == "physics is a type of science"

    def test_gen_prompt_keeps_hyponym_in_x(self):
        # the hypernym slot comes first in this template
        assert render(lookup("gen"), "trout", "fish") == "fish is more general than trout"

    def test_spec_prompt(self):
        assert render(lookup("spec"), "trout", "fish") == "trout is more specific than fish"

    def test_kind_prompt(self):
        assert render(lookup("kind"), "physics", "science") == "physics is a kind of science"

    def test_accepts_terms_and_strings(self):
        assert render(lookup("type"), Term("Trout"), Term("fish")) == "trout is a type of fish"

    def test_empty_term_rejected(self):
        with pytest.raises(ValueError):
            render(lookup("type"), "", "fish")

    def test_no_placeholder_survives(self):
        out = render(lookup("type"), "trout", "fish")
        assert "[X]" not in out and "[Y]" not in out


class TestRenderMasked:
    def test_type_masked(self):
        assert render_masked(lookup("type"), "trout", "[MASK]") == "trout is a type of [MASK]"

    def test_gen_masked(self):
        assert render_masked(lookup("gen"), "trout", "[MASK]") == "[MASK] is more general than trout"

    def test_backend_specific_literal(self):
        assert render_masked(lookup("type"), "oak", "<mask>") == "oak is a type of <mask>"

    def test_mask_occurs_exactly_once(self):
        for template in builtin_templates():
            sentence = render_masked(template, "oak", "<mask>")
            assert sentence.count("<mask>") == 1

    def test_hyponym_containing_literal_rejected(self):
        with pytest.raises(ValueError):
            render_masked(lookup("type"), "odd <mask> term", "<mask>")


class TestBuiltinRegistry:
    def test_type_pattern(self):
        assert lookup("type").pattern == "[X] is a type of [Y]"

    def test_kind_pattern(self):
        assert lookup("kind").pattern == "[X] is a kind of [Y]"

    def test_registry_size(self):
        assert len(builtin_templates()) >= 9

    def test_names_are_unique(self):
        names = [t.name for t in builtin_templates()]
        assert len(names) == len(set(names))

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            lookup("nope")

    @given(st.sampled_from(["trout", "fish", "oak tree", "rainbow trout", "dog"]),
           st.sampled_from(["animal", "plant", "salmon", "sea fish"]))
    def test_builtins_are_asymmetric(self, a, b):
        for template in builtin_templates():
            assert render(template, a, b) != render(template, b, a)


class TestLoadTemplates:
    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "templates.tsv"
        p.write_text("# comment\nsort\t[X] is a sort of [Y]\n\n", encoding="utf-8")
        templates = load_templates(p)
        assert len(templates) == 1
        assert templates[0].name == "sort"
        assert render(templates[0], "a", "b") == "a is a sort of b"

    def test_malformed_row(self, tmp_path):
        p = tmp_path / "templates.tsv"
        p.write_text("no tab here\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="row 1"):
            load_templates(p)

    def test_lookup_prefers_extra(self, tmp_path):
        extra = [PromptTemplate("type", "[X] sure is a type of [Y]")]
        assert lookup("type", extra).pattern == "[X] sure is a type of [Y]"


def test_pairwise_renders_distinct_across_builtins():
    # different templates give different sentences for the same pair
    outputs = [render(t, "trout", "fish") for t in builtin_templates()]
    for a, b in itertools.combinations(outputs, 2):
        assert a != b
