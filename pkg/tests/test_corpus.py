import pytest
from hypothesis import given, strategies as st

from soundtrace.corpus import (Alphabet, Attestation, Condition, CorpusError,
                               TimeBin, TimeBinnedCorpus, TokenizationPolicy,
                               bin_attestations, load_attestation_table,
                               load_plain_corpus, make_shuffle_control,
                               save_plain_corpus, tokenize, tokenize_with_report)


def small_corpus():
    alpha = Alphabet(tuple("ab"))
    return TimeBinnedCorpus(alpha, (
        TimeBin(1, "b1", ("ab", "ba", "aa")),
        TimeBin(2, "b2", ("bb", "ab")),
    ))


class TestAlphabet:
    def test_membership_and_order(self):
        a = Alphabet(("b", "a"))
        assert "a" in a and "b" in a and "#" not in a
        assert a.symbols == ("b", "a")

    def test_validation(self):
        with pytest.raises(CorpusError):
            Alphabet(())
        with pytest.raises(CorpusError):
            Alphabet(("ab",))
        with pytest.raises(CorpusError):
            Alphabet(("a", "a"))
        with pytest.raises(CorpusError):
            Alphabet(("a", "#"))
        with pytest.raises(CorpusError):
            Alphabet(("a",), classes={"V": frozenset("x")})

    def test_from_tokens_splits_vowels(self):
        a = Alphabet.from_tokens(["kat", "is"])
        assert a.classes["V"] == frozenset("ai")
        assert a.classes["C"] == frozenset("kts")

    def test_dict_round_trip(self):
        a = Alphabet(tuple("abk"), classes={"V": frozenset("a")})
        assert Alphabet.from_dict(a.to_dict()) == a


class TestTimeBinnedCorpus:
    def test_needs_two_bins(self):
        alpha = Alphabet(tuple("ab"))
        with pytest.raises(CorpusError):
            TimeBinnedCorpus(alpha, (TimeBin(1, "x", ("a",)),))

    def test_indices_must_be_consecutive(self):
        alpha = Alphabet(tuple("ab"))
        with pytest.raises(CorpusError, match="consecutive"):
            TimeBinnedCorpus(alpha, (TimeBin(1, "x", ("a",)), TimeBin(3, "y", ("b",))))

    def test_rejects_out_of_alphabet_tokens(self):
        alpha = Alphabet(tuple("ab"))
        with pytest.raises(CorpusError, match="outside"):
            TimeBinnedCorpus(alpha, (TimeBin(1, "x", ("az",)), TimeBin(2, "y", ("b",))))

    def test_bin_rejects_empty_token(self):
        with pytest.raises(CorpusError):
            TimeBin(1, "x", ("a", ""))

    def test_with_condition(self):
        c = small_corpus().with_condition(Condition.CONTROL)
        assert c.condition is Condition.CONTROL
        assert c.bins == small_corpus().bins


class TestTokenize:
    def test_lowercases_and_strips(self):
        assert tokenize("Hej, verden! 42") == ["hej", "verden"]

    def test_drops_out_of_alphabet_words_with_count(self):
        policy = TokenizationPolicy(alphabet=Alphabet(tuple("abch")))
        tokens, dropped = tokenize_with_report("abc hab zzz qqq", policy)
        assert tokens == ["abc", "hab"]
        assert dropped == 2

    def test_words_emptied_by_stripping_are_not_drops(self):
        policy = TokenizationPolicy(alphabet=Alphabet(tuple("ab")))
        tokens, dropped = tokenize_with_report("ab ... 123", policy)
        assert tokens == ["ab"] and dropped == 0

    @given(st.lists(st.text(alphabet="abcde", min_size=1, max_size=6), max_size=20))
    def test_round_trips_clean_tokens(self, words):
        assert tokenize(" ".join(words)) == words


class TestBinAttestations:
    ATTS = [Attestation("aa", 1800), Attestation("ab", 1849),
            Attestation("ba", 1850), Attestation("bb", 1949)]

    def test_year_to_bin_mapping(self):
        corpus, dropped = bin_attestations(self.ATTS, 1800, 50, 3)
        assert dropped == 0
        assert corpus.bins[0].tokens == ("aa", "ab")
        assert corpus.bins[1].tokens == ("ba",)
        assert corpus.bins[2].tokens == ("bb",)
        assert corpus.bins[0].label == "1800-1849"

    def test_early_years_fold_into_bin_one(self):
        atts = [Attestation("aa", 1700)] + self.ATTS
        corpus, dropped = bin_attestations(atts, 1800, 50, 3)
        assert dropped == 0
        assert corpus.bins[0].tokens[0] == "aa"

    def test_early_years_dropped_when_not_folding(self):
        atts = [Attestation("aa", 1700)] + self.ATTS
        _, dropped = bin_attestations(atts, 1800, 50, 3, fold_early=False)
        assert dropped == 1

    def test_late_years_always_dropped(self):
        atts = self.ATTS + [Attestation("ba", 1950)]
        _, dropped = bin_attestations(atts, 1800, 50, 3)
        assert dropped == 1

    def test_rejects_degenerate_requests(self):
        with pytest.raises(CorpusError):
            bin_attestations(self.ATTS, 1800, 0, 3)
        with pytest.raises(CorpusError):
            bin_attestations(self.ATTS, 1800, 50, 1)
        with pytest.raises(CorpusError):
            bin_attestations([Attestation("a", 2100)], 1800, 50, 3)


class TestShuffleControl:
    def test_preserves_sizes_and_pool(self):
        corpus = small_corpus()
        shuffled = make_shuffle_control(corpus, 7)
        assert shuffled.condition is Condition.CONTROL
        for orig, new in zip(corpus.bins, shuffled.bins):
            assert len(orig.tokens) == len(new.tokens)
        pool = sorted(t for b in corpus.bins for t in b.tokens)
        assert sorted(t for b in shuffled.bins for t in b.tokens) == pool

    def test_deterministic_per_seed(self):
        corpus = small_corpus()
        a = make_shuffle_control(corpus, 3)
        b = make_shuffle_control(corpus, 3)
        assert a.bins == b.bins

    @given(st.lists(st.lists(st.sampled_from(["ab", "ba", "aa", "bb"]),
                             min_size=1, max_size=8),
                    min_size=2, max_size=4),
           st.integers(0, 2 ** 31))
    def test_token_multiset_invariant(self, per_bin, seed):
        alpha = Alphabet(tuple("ab"))
        corpus = TimeBinnedCorpus(alpha, tuple(
            TimeBin(i, f"b{i}", tuple(toks)) for i, toks in enumerate(per_bin, 1)))
        shuffled = make_shuffle_control(corpus, seed)
        assert sorted(t for b in shuffled.bins for t in b.tokens) == \
            sorted(t for b in corpus.bins for t in b.tokens)


class TestAttestationTable:
    def test_reads_and_warns(self, tmp_path):
        path = tmp_path / "atts.tsv"
        path.write_text("# comment\n1800\tAbc\n\nbadline\nxx\tform\n1900\t\n1850\tdef\n",
                        encoding="utf-8")
        atts, warnings = load_attestation_table(path)
        assert atts == [Attestation("abc", 1800), Attestation("def", 1850)]
        assert len(warnings) == 3

    def test_raises_when_nothing_valid(self, tmp_path):
        path = tmp_path / "atts.tsv"
        path.write_text("# nothing\n", encoding="utf-8")
        with pytest.raises(CorpusError):
            load_attestation_table(path)


class TestPlainCorpusIO:
    def test_round_trip(self, tmp_path):
        corpus = small_corpus()
        manifest = save_plain_corpus(corpus, tmp_path / "c")
        loaded = load_plain_corpus(manifest)
        # labels become the file stems; indices and token order survive
        assert [(b.index, b.tokens) for b in loaded.bins] == \
            [(b.index, b.tokens) for b in corpus.bins]
        assert loaded.alphabet == corpus.alphabet

    def test_load_accepts_directory(self, tmp_path):
        corpus = small_corpus()
        save_plain_corpus(corpus, tmp_path / "c")
        loaded = load_plain_corpus(tmp_path / "c")
        assert [b.tokens for b in loaded.bins] == [b.tokens for b in corpus.bins]

    def test_malformed_manifest(self, tmp_path):
        bad = tmp_path / "manifest.tsv"
        bad.write_text("1\ta.txt\textra\n", encoding="utf-8")
        with pytest.raises(CorpusError):
            load_plain_corpus(bad)
