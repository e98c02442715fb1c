import json
import math

import numpy as np
import pytest

from adpersuasion.errors import ConfigError, InputFormatError
from adpersuasion.features import (PrepConfig, TfidfFeaturizer, Vocabulary, average_tfidf, build_vocabulary,
                                   canonical_bigrams, canonical_ngrams, default_stopwords, featurizer_from_dict,
                                   normalize, preprocess, stem, tfidf, tfidf_matrix, top_ngrams)


class TestNormalize:
    def test_analysis_strips_links_emoji_punctuation(self):
        cfg = PrepConfig.for_analysis()
        assert normalize("Vote NOW!!! https://example.org/x 🔥🔥 www.site.au", cfg) == "vote now"

    def test_classifier_keeps_punctuation_as_tokens(self):
        assert preprocess("Vote now!", PrepConfig.for_classifier()) == ["vote", "now", "!"]

    def test_lowercase_can_be_disabled(self):
        assert normalize("Vote Now", PrepConfig(lowercase=False)) == "Vote Now"

    @pytest.mark.parametrize("text", ["Stop the  madness!! 😡 http://x.y", "  It's   «quoted» — text. ", ""])
    @pytest.mark.parametrize("cfg", [PrepConfig(), PrepConfig.for_analysis(), PrepConfig.for_classifier()])
    def test_idempotent(self, text, cfg):
        once = normalize(text, cfg)
        assert normalize(once, cfg) == once

    def test_stopwords_removed(self):
        assert preprocess("We will fight for our town", PrepConfig.for_analysis()) == ["fight", "town"]

    def test_custom_stopwords(self):
        cfg = PrepConfig(remove_stopwords=True, stopword_list=frozenset({"town"}))
        assert preprocess("our town", cfg) == ["our"]

    def test_default_stopwords_loaded(self):
        words = default_stopwords()
        assert "the" in words and "now" in words


class TestStem:
    @pytest.mark.parametrize("token, expected", [
        ("votes", "vote"), ("parties", "party"), ("running", "run"), ("played", "play"),
        ("churches", "church"), ("class", "class"), ("news", "news"), ("bus", "bus"), ("sing", "sing"),
    ])
    def test_suffixes(self, token, expected):
        assert stem(token) == expected

    def test_stem_enabled_in_preprocess(self):
        assert preprocess("voters voting", PrepConfig(stem=True)) == ["voter", "vot"]


class TestNgrams:
    def test_canonical_bigrams_merge_orders(self):
        counts = canonical_bigrams(["a", "b", "b", "a"])
        assert counts == {("a", "b"): 2, ("b", "b"): 1}

    def test_tax_cut_tax(self):
        assert canonical_bigrams(["tax", "cut", "tax"]) == {("cut", "tax"): 2}

    def test_keys_always_sorted(self, rng):
        words = np.array(["tax", "cut", "jobs", "vote", "now", "a"])
        for _ in range(1000):
            tokens = list(rng.choice(words, size=int(rng.integers(0, 12))))
            counts = canonical_bigrams(tokens)
            assert all(list(key) == sorted(key) for key in counts)
            assert sum(counts.values()) == max(len(tokens) - 1, 0)

    def test_short_input(self):
        assert canonical_bigrams(["a"]) == {}

    def test_trigrams_sorted(self):
        assert canonical_ngrams(["c", "a", "b"], 3) == {("a", "b", "c"): 1}

    def test_order_below_two(self):
        with pytest.raises(ConfigError):
            canonical_ngrams(["a"], 1)

    def test_top_ngrams_ties_lexicographic(self):
        docs = [["x", "y"], ["b", "a"], ["c", "d"], ["y", "x"]]
        assert top_ngrams(docs, 2, 2) == [(("x", "y"), 2), (("a", "b"), 1)]


class TestTfidf:
    def test_weights(self):
        docs = [["a", "b"], ["a", "c"]]
        vocab = build_vocabulary(docs)
        assert vocab.terms == ("a", "b", "c")
        vector = tfidf(["a", "b"], vocab)
        assert vector.get(0) == pytest.approx(0.5)
        assert vector.get(1) == pytest.approx(0.5 * (math.log(1.5) + 1))
        assert vector.get(2) == 0.0

    def test_count_over_length_times_smoothed_idf(self):
        docs = [["vote", "labor", "vote"], ["local", "team"]]
        vocab = build_vocabulary(docs)
        matrix = tfidf_matrix(docs, vocab).toarray()
        assert matrix[0, vocab.index("vote")] == pytest.approx(0.9369767387387762, abs=1e-15)
        assert matrix[0, vocab.index("labor")] == pytest.approx((math.log(1.5) + 1) / 3, abs=1e-15)
        assert matrix[1, vocab.index("vote")] == 0.0

    def test_idf_is_smoothed(self, rng):
        words = [f"w{i}" for i in range(12)]
        docs = [list(rng.choice(words, size=int(rng.integers(1, 6)))) for _ in range(15)]
        vocab = build_vocabulary(docs)
        np.testing.assert_allclose(vocab.idf(), np.log(16 / (1 + vocab.df)) + 1, rtol=1e-12)

    def test_restored_vocabulary_gives_same_matrix(self, rng):
        words = [f"w{i}" for i in range(12)]
        docs = [list(rng.choice(words, size=int(rng.integers(0, 6)))) for _ in range(15)]
        vocab = build_vocabulary(docs)
        restored = Vocabulary.from_dict(json.loads(json.dumps(vocab.to_dict())))
        assert restored.terms == vocab.terms
        np.testing.assert_array_equal(tfidf_matrix(docs, restored).toarray(), tfidf_matrix(docs, vocab).toarray())

    def test_no_term_survives_min_df(self):
        vocab = build_vocabulary([["a"], ["b"]], min_df=3)
        assert len(vocab) == 0
        assert tfidf_matrix([["a"], ["b"]], vocab).shape == (2, 0)

    def test_only_empty_documents(self):
        vocab = build_vocabulary([[], []])
        assert len(vocab) == 0
        assert len(tfidf(["a"], vocab)) == 0

    def test_empty_document_is_zero_vector(self):
        vocab = build_vocabulary([["a"]])
        assert len(tfidf([], vocab)) == 0

    def test_out_of_vocabulary_counts_in_length(self):
        vocab = build_vocabulary([["a"]])
        assert tfidf(["a", "zzz"], vocab).get(0) == pytest.approx(0.5)

    def test_weights_positive_for_present_terms(self, rng):
        words = [f"w{i}" for i in range(30)]
        docs = [list(rng.choice(words, size=8)) for _ in range(20)]
        vocab = build_vocabulary(docs)
        for doc in docs:
            vector = tfidf(doc, vocab)
            assert np.all(vector.weights > 0)
            assert sorted(vocab.index(t) for t in set(doc)) == vector.indices.tolist()

    def test_matrix_rows_match_vectors(self):
        docs = [["a", "b", "a"], ["c"], []]
        vocab = build_vocabulary(docs)
        dense = tfidf_matrix(docs, vocab).toarray()
        for row, doc in zip(dense, docs):
            np.testing.assert_allclose(row, tfidf(doc, vocab).to_dense())

    def test_min_df(self):
        assert build_vocabulary([["a", "b"], ["a"]], min_df=2).terms == ("a",)

    def test_vocabulary_needs_documents(self):
        with pytest.raises(ConfigError):
            build_vocabulary([])

    def test_average_tfidf_ranking(self):
        docs = [["vote", "vote", "now"], ["vote", "today"]]
        vocab = build_vocabulary(docs)
        ranked = average_tfidf(docs, vocab, 3)
        assert [term for term, _ in ranked] == ["vote", "today", "now"]
        assert ranked[1][1] > ranked[2][1]


class TestTfidfFeaturizer:
    TEXTS = ["Vote now, before it is too late!", "The council meets on Monday.", "Now is the time to act!"]

    def test_rows_are_unit_length(self):
        X = TfidfFeaturizer().fit_transform(self.TEXTS)
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        np.testing.assert_allclose(norms, 1.0)

    def test_unknown_text_gives_zero_row(self):
        featurizer = TfidfFeaturizer().fit(self.TEXTS)
        assert featurizer.transform(["qqq zzz"]).nnz == 0

    def test_bigram_terms(self):
        featurizer = TfidfFeaturizer(PrepConfig(), use_bigrams=True).fit(["vote now"])
        assert featurizer.vocabulary.terms == ("now", "now vote", "vote")

    def test_dict_round_trip_keeps_digest(self):
        featurizer = TfidfFeaturizer(min_df=1, use_bigrams=True).fit(self.TEXTS)
        restored = featurizer_from_dict(featurizer.to_dict())
        assert restored.digest() == featurizer.digest()
        np.testing.assert_allclose(restored.transform(self.TEXTS).toarray(),
                                   featurizer.transform(self.TEXTS).toarray())

    def test_transform_before_fit(self):
        with pytest.raises(ConfigError):
            TfidfFeaturizer().transform(["x"])

    def test_unknown_kind(self):
        with pytest.raises(InputFormatError):
            featurizer_from_dict({"kind": "transformer"})

    def test_prep_config_round_trip(self):
        cfg = PrepConfig(remove_stopwords=True, stopword_list=frozenset({"b", "a"}), stem=True)
        assert PrepConfig.from_dict(cfg.to_dict()) == cfg

    def test_prep_config_rejects_unknown_keys(self):
        with pytest.raises(ConfigError):
            PrepConfig.from_dict({"lemmatize": True})
