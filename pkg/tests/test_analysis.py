import pytest
from hypothesis import given
from hypothesis import strategies as st

from taxolm.analysis import (
    _count_file,
    count_prompt_frequency,
    filter_single_token,
    single_token_report,
)
from taxolm.backends.mock import MockBackend
from taxolm.errors import CapabilityError
from taxolm.induction import InductionConfig
from taxolm.terminology import Taxonomy, Terminology


@pytest.fixture
def single_token_backend():
    # every fixture term is in the vocabulary; "rainbow trout" is two tokens
    vocab = ["trout", "fish", "salmon", "animal", "plant", "rainbow",
             "is", "a", "type", "of", "[MASK]"]
    table = {
        "trout is a type of [MASK]": {"fish": 0.5},
        "salmon is a type of [MASK]": {"fish": 0.5},
        "fish is a type of [MASK]": {"animal": 0.5},
        "plant is a type of [MASK]": {"animal": 0.4},
    }
    return MockBackend("masked", vocab, table)


class TestFilterSingleToken:
    def test_all_single_token_keeps_everything(self, single_token_backend):
        gold = Taxonomy([("trout", "fish"), ("fish", "animal")])
        filtered, retained = filter_single_token(single_token_backend, gold)
        assert filtered == gold
        assert retained == 100.0

    def test_multi_token_hypernym_drops_its_hyponyms(self, single_token_backend):
        gold = Taxonomy([
            ("trout", "fish"),
            ("salmon", "rainbow trout"),   # multi-token hypernym
            ("salmon", "fish"),            # same hyponym, single-token hypernym
            ("plant", "animal"),
        ])
        filtered, retained = filter_single_token(single_token_backend, gold)
        hyponyms = {e.hyponym.surface for e in filtered.edges}
        # salmon has one multi-token hypernym, so salmon drops entirely
        assert hyponyms == {"trout", "plant"}
        assert retained == pytest.approx(100.0 * 2 / 3)

    def test_filtered_edges_are_a_subset(self, single_token_backend):
        gold = Taxonomy([("trout", "fish"), ("salmon", "rainbow trout")])
        filtered, _ = filter_single_token(single_token_backend, gold)
        assert filtered.edges <= gold.edges

    def test_requires_masked_backend(self):
        causal = MockBackend("causal", ["a", "b"])
        with pytest.raises(CapabilityError):
            filter_single_token(causal, Taxonomy([("a", "b")]))


class TestSingleTokenReport:
    def test_identity_filter_means_zero_increase(self, single_token_backend):
        terminology = Terminology(["trout", "fish", "salmon", "animal"])
        gold = Taxonomy([("trout", "fish"), ("salmon", "fish"), ("fish", "animal")])
        config = InductionConfig(method="restrict_mlm", template="type", k=1,
                                 backend=single_token_backend)
        report = single_token_report(single_token_backend, config, terminology, gold)
        assert report.total_terms == 3
        assert report.retained_pct == 100.0
        assert report.f_filtered == report.f_original
        assert report.increase_pct == 0.0

    def test_multi_token_hypernyms_shrink_the_gold(self, single_token_backend):
        terminology = Terminology(["trout", "fish", "salmon", "animal", "rainbow trout"])
        gold = Taxonomy([("trout", "fish"), ("salmon", "rainbow trout"), ("fish", "animal")])
        config = InductionConfig(method="restrict_mlm", template="type", k=1,
                                 backend=single_token_backend)
        report = single_token_report(single_token_backend, config, terminology, gold)
        assert report.total_terms == 3
        assert report.retained_pct == pytest.approx(100.0 * 2 / 3)
        assert report.increase_pct == pytest.approx(report.f_filtered - report.f_original)


class TestPromptFrequency:
    def test_empty_corpus(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("", encoding="utf-8")
        counts = count_prompt_frequency(p, ["is a type of"])
        assert counts[0].count == 0

    def test_direct_count(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("x is a type of y. z is a type of w.", encoding="utf-8")
        counts = count_prompt_frequency(p, ["is a type of"])
        assert counts[0].count == 2

    def test_containment_order(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("x is a type of y. z is a thing. w is a type.", encoding="utf-8")
        by_pattern = {f.pattern: f.count for f in
                      count_prompt_frequency(p, ["is a", "is a type of"])}
        assert by_pattern["is a"] >= by_pattern["is a type of"]

    def test_case_insensitive(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("X IS A TYPE OF Y", encoding="utf-8")
        assert count_prompt_frequency(p, ["is a type of"])[0].count == 1

    def test_whitespace_normalized_across_newlines(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("x is a\ntype of y", encoding="utf-8")
        assert count_prompt_frequency(p, ["is a type of"])[0].count == 1

    def test_overlapping_occurrences(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("aaaa", encoding="utf-8")
        assert count_prompt_frequency(p, ["aa"])[0].count == 3

    def test_multiple_files_sum(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        a.write_text("is a type of", encoding="utf-8")
        b.write_text("is a type of", encoding="utf-8")
        assert count_prompt_frequency([a, b], ["is a type of"])[0].count == 2

    def test_chunk_boundaries_do_not_split_matches(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("x is a type of y and q is a type of r", encoding="utf-8")
        counts = [0]
        _count_file(p, ["is a type of"], len("is a type of"), counts, chunk_size=3)
        assert counts[0] == 2

    def test_empty_pattern_rejected(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("text", encoding="utf-8")
        with pytest.raises(ValueError):
            count_prompt_frequency(p, ["  "])

    def test_unreadable_corpus(self, tmp_path):
        with pytest.raises(OSError):
            count_prompt_frequency(tmp_path / "missing.txt", ["is a"])

    @given(st.text(alphabet="ab .\n", max_size=120),
           st.text(alphabet="ab ", min_size=1, max_size=4).filter(str.strip),
           st.text(alphabet="ab ", min_size=1, max_size=4))
    def test_prefix_extension_monotonicity(self, tmp_path_factory, corpus, stem, extension):
        p = tmp_path_factory.mktemp("freq") / "corpus.txt"
        p.write_text(corpus, encoding="utf-8")
        short, long = stem, stem + extension
        by_pattern = {f.pattern: f.count for f in count_prompt_frequency(p, [short, long])}
        assert by_pattern[short] >= by_pattern[long]
