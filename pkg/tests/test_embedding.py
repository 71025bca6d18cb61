from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_contexts, brute_counts, brute_ppmi
from soundtrace.corpus import Alphabet, TimeBin
from soundtrace.embedding import (CooccurrenceCounts, EmbeddingError,
                                  EmbeddingMatrix, align_bins, count_bin,
                                  count_tokens, extract_contexts, ppmi)

AB = Alphabet(tuple("ab"))


class TestExtractContexts:
    def test_bigram_contexts_of_pi(self):
        got = Counter(extract_contexts("pi", 2))
        assert got == Counter([("p", "_i"), ("p", "#_"), ("i", "p_"), ("i", "_#")])

    def test_trigram_contexts_of_aba(self):
        got = Counter(extract_contexts("aba", 3))
        assert len(list(got.elements())) == 9
        assert got == Counter([
            ("a", "_ba"), ("a", "#_b"), ("a", "##_"),
            ("b", "_a#"), ("b", "a_a"), ("b", "#a_"),
            ("a", "_##"), ("a", "b_#"), ("a", "ab_"),
        ])

    def test_agrees_with_brute_force(self):
        for word in ("a", "ab", "baab", "ababa"):
            for n in (2, 3, 4):
                assert Counter(extract_contexts(word, n)) == \
                    Counter(brute_contexts(word, n))

    def test_rejects_window_below_two(self):
        with pytest.raises(EmbeddingError):
            extract_contexts("ab", 1)


class TestCountTokens:
    def test_matches_per_word_enumeration(self):
        tokens = ("ab", "ab", "ba", "aab")
        for n in (2, 3):
            counts = count_tokens(tokens, n, AB)
            assert counts.counts == dict(brute_counts(tokens, n))
            assert counts.grand_total == sum(counts.counts.values())

    @settings(max_examples=60)
    @given(st.lists(st.text(alphabet="ab", min_size=1, max_size=5),
                    min_size=1, max_size=12),
           st.integers(2, 3))
    def test_equivalence_property(self, tokens, n):
        assert count_tokens(tuple(tokens), n, AB).counts == \
            dict(brute_counts(tokens, n))

    def test_windows_never_span_tokens(self):
        # "a","b" as separate tokens must not create an (a, _b) context
        counts = count_tokens(("a", "b"), 2, AB)
        assert ("a", "_b") not in counts.counts

    def test_marginals_consistent(self):
        counts = count_tokens(("abab", "bb"), 3, AB)
        assert sum(counts.char_totals.values()) == counts.grand_total
        assert sum(counts.context_totals.values()) == counts.grand_total

    def test_rejects_foreign_characters(self):
        with pytest.raises(EmbeddingError):
            count_tokens(("az",), 2, AB)

    def test_count_bin_delegates(self):
        b = TimeBin(1, "x", ("ab", "ba"))
        assert count_bin(b, 2, AB).counts == count_tokens(b.tokens, 2, AB).counts

    def test_empty_tokens(self):
        assert count_tokens((), 2, AB).grand_total == 0


class TestPPMI:
    def micro_corpora(self, k=20):
        rng = np.random.default_rng(99)
        chars = np.array(list("ab"))
        for _ in range(k):
            n_words = int(rng.integers(1, 11))
            yield tuple("".join(rng.choice(chars, size=rng.integers(1, 6)))
                        for _ in range(n_words))

    def test_matches_brute_force_oracle(self):
        for tokens in self.micro_corpora():
            for n in (2, 3):
                counts = count_tokens(tokens, n, AB)
                dims, (mat,) = align_bins([counts])
                expected = brute_ppmi(tokens, n)
                for ci, c in enumerate(mat.chars):
                    for j, ctx in enumerate(dims):
                        assert mat.matrix[ci, j] == pytest.approx(
                            expected.get((c, ctx), 0.0), abs=1e-12)

    def test_duplication_invariance(self):
        tokens = ("ab", "ba", "aab")
        a = align_bins([count_tokens(tokens, 2, AB)])[1][0]
        b = align_bins([count_tokens(tokens * 3, 2, AB)])[1][0]
        assert np.allclose(a.matrix, b.matrix, atol=1e-12)

    def test_contexts_outside_basis_still_feed_marginals(self):
        counts = count_tokens(("ab", "ba"), 2, AB)
        full_dims, (full,) = align_bins([counts])
        some = tuple(d for d in full_dims if d != "_#")
        partial = ppmi(counts, some)
        for ctx in some:
            assert partial.entry("a", ctx) == full.entry("a", ctx)

    def test_empty_counts_raise(self):
        with pytest.raises(EmbeddingError):
            ppmi(CooccurrenceCounts(2, {}, {}, {}, 0), ("_a",))


class TestAlignBins:
    def test_shared_sorted_union_basis(self):
        c1 = count_tokens(("ab",), 2, AB)
        c2 = count_tokens(("ba",), 2, AB)
        dims, mats = align_bins([c1, c2])
        assert dims == tuple(sorted(set(c1.context_totals) | set(c2.context_totals)))
        assert all(m.dimensions == dims for m in mats)

    def test_unobserved_contexts_are_zero(self):
        c1 = count_tokens(("aa",), 2, AB)
        c2 = count_tokens(("bb",), 2, AB)
        _, (m1, _) = align_bins([c1, c2])
        assert m1.entry("a", "b_") == 0.0

    def test_mixed_window_sizes_raise(self):
        with pytest.raises(EmbeddingError, match="mixed"):
            align_bins([count_tokens(("ab",), 2, AB), count_tokens(("ab",), 3, AB)])

    def test_empty_input_raises(self):
        with pytest.raises(EmbeddingError):
            align_bins([])


class TestEmbeddingMatrix:
    def make(self):
        return EmbeddingMatrix(2, ("_a", "a_"), ("a", "b"),
                               np.array([[0.5, 0.0], [1.25, 2.0]]))

    def test_vector_and_entry(self):
        m = self.make()
        assert m.vector("b").tolist() == [1.25, 2.0]
        assert m.entry("a", "_a") == 0.5
        assert m.entry("a", "missing") == 0.0

    def test_unknown_char_raises_with_name(self):
        with pytest.raises(EmbeddingError, match="'z'"):
            self.make().vector("z")

    def test_shape_mismatch_raises(self):
        with pytest.raises(EmbeddingError):
            EmbeddingMatrix(2, ("_a",), ("a", "b"), np.zeros((1, 1)))

    def test_tsv_round_trip(self, tmp_path):
        m = self.make()
        path = tmp_path / "emb.tsv"
        m.save_tsv(path, bin_label="bin 1", condition="target")
        loaded = EmbeddingMatrix.load_tsv(path)
        assert loaded.n == m.n
        assert loaded.dimensions == m.dimensions
        assert loaded.chars == m.chars
        assert np.array_equal(loaded.matrix, m.matrix)
