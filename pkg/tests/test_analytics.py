from datetime import date, timedelta
import itertools
import math

import numpy as np
import pytest

from adpersuasion.analytics import (Bucket, BucketThresholds, Trend, assign_bucket, avg_sentences_per_ad,
                                    bucket_counts, bucket_stats, compare_buckets, daily_series, growth_ratio,
                                    load_scored_ads, mann_kendall, moving_average, pearson, plot_frame,
                                    relative_diff_pct, score_ads, scored_ad, split_sentences, trend_report,
                                    write_scored_ads)
from adpersuasion.corpus import Demographic, generate_synthetic_ads
from adpersuasion.errors import ConfigError, ShapeMismatchError, UndefinedStatisticError
from adpersuasion.features import TfidfFeaturizer
from adpersuasion.model import LinearModel, Target
from conftest import LABEL_PRIORS, make_ad

MAY = date(2022, 5, 1)


def constant_model(texts, bias: float) -> LinearModel:
    featurizer = TfidfFeaturizer().fit(texts)
    W = np.zeros((featurizer.dim + 1, 1))
    W[-1, 0] = bias
    return LinearModel(W, ("persuasive",), "schema", Target.BINARY, featurizer)


def brute_force_s(x):
    return sum(np.sign(x[j] - x[i]) for i, j in itertools.combinations(range(len(x)), 2))


class TestSplitSentences:
    def test_terminal_marks(self):
        assert split_sentences("Vote now! Is it time? Yes.") == ["Vote now!", "Is it time?", "Yes."]

    def test_abbreviations_do_not_split(self):
        text = "Dr. Smith agrees. The U.S. economy, e.g. jobs, matters."
        assert split_sentences(text) == ["Dr. Smith agrees.", "The U.S. economy, e.g. jobs, matters."]

    def test_initials_do_not_split(self):
        assert split_sentences("Authorised by J. Citizen. Vote 1.") == ["Authorised by J. Citizen.", "Vote 1."]

    def test_unterminated_tail_is_a_sentence(self):
        assert split_sentences("First one. then this") == ["First one.", "then this"]

    def test_decimal_point_does_not_split(self):
        assert split_sentences("We invested 3.5 billion. Done.") == ["We invested 3.5 billion.", "Done."]

    @pytest.mark.parametrize("text", ["", "   ", "!!! ...", "🔥🔥"])
    def test_nothing_to_extract(self, text):
        assert split_sentences(text) == []

    def test_custom_abbreviations(self):
        assert split_sentences("See Sen. Jones.", frozenset({"sen"})) == ["See Sen. Jones."]


class TestBuckets:
    @pytest.mark.parametrize("score, bucket", [(1.0, Bucket.HIGH), (0.8, Bucket.HIGH), (0.79, Bucket.MID),
                                               (0.5, Bucket.MID), (0.21, Bucket.MID), (0.2, Bucket.LOW),
                                               (0.0, Bucket.LOW)])
    def test_boundaries(self, score, bucket):
        assert assign_bucket(score) is bucket

    def test_custom_thresholds(self):
        assert assign_bucket(0.6, BucketThresholds(0.6, 0.4)) is Bucket.HIGH

    def test_invalid_thresholds(self):
        with pytest.raises(ConfigError):
            BucketThresholds(0.2, 0.8)

    def test_four_of_five_is_high(self):
        scored = scored_ad(make_ad(), [True, True, True, True, False])
        assert scored.score == pytest.approx(0.8)
        assert scored.bucket is Bucket.HIGH

    def test_all_neutral_is_low(self):
        assert scored_ad(make_ad(), [False, False]).bucket is Bucket.LOW

    def test_no_sentences_rejected(self):
        with pytest.raises(ConfigError):
            scored_ad(make_ad(), [])

    def test_partition(self, rng):
        ads = [scored_ad(make_ad(f"a{i}"), list(rng.random(5) < rng.random())) for i in range(100)]
        counts = bucket_counts(ads)
        assert sum(counts.values()) == 100


class TestScoreAds:
    TEXT = "Vote now. Vote today. Vote early. Vote often. The hall opens at nine."

    def test_all_neutral_classifier(self):
        ads = [make_ad("a1", "One thing. Another thing."), make_ad("a2", "Just this.")]
        scored = score_ads(ads, constant_model(["one thing", "just this"], -10.0))
        assert [s.bucket for s in scored] == [Bucket.LOW, Bucket.LOW]
        assert [s.n_sentences for s in scored] == [2, 1]

    def test_keyword_classifier(self):
        model = constant_model(split_sentences(self.TEXT), -5.0)
        W = model.W.copy()
        W[model.featurizer.vocabulary.index("vote"), 0] = 20.0
        scored = score_ads([make_ad("a1", self.TEXT)], model.with_weights(W))
        assert (scored[0].n_sentences, scored[0].n_persuasive) == (5, 4)
        assert scored[0].bucket is Bucket.HIGH

    def test_ads_without_sentences_excluded(self):
        ads = [make_ad("a1", ""), make_ad("a2", "Something here.")]
        scored = score_ads(ads, constant_model(["something here"], 10.0))
        assert [s.ad.ad_id for s in scored] == ["a2"]
        assert scored[0].bucket is Bucket.HIGH

    def test_technique_model_recovers_planted_buckets(self, technique_model):
        corpus = generate_synthetic_ads(300, LABEL_PRIORS, seed=5)
        scored = score_ads(corpus.ads, technique_model, 0.5)
        assert len(scored) == 300
        agreement = np.mean([s.bucket.value == planted for s, planted in zip(scored, corpus.planted)])
        assert agreement >= 0.8
        assert avg_sentences_per_ad(scored) == 4.0

    def test_scored_csv_round_trip(self, tmp_path):
        scored = [scored_ad(make_ad("a1"), [True, False, False]), scored_ad(make_ad("a2"), [True])]
        write_scored_ads(tmp_path / "scored.csv", scored)
        assert load_scored_ads(tmp_path / "scored.csv") == scored


class TestBucketStats:
    def test_averages_over_members(self):
        scored = [
            scored_ad(make_ad("a1", impressions=(19500, 20500), start=MAY, end=MAY + timedelta(days=10)), [True]),
            scored_ad(make_ad("a2", impressions=(29500, 30500)), [True]),
            scored_ad(make_ad("a3", impressions=(0, 999)), [False]),
        ]
        stats = bucket_stats(scored, Bucket.HIGH)
        assert stats.n_ads == 2
        assert stats.avg_impressions == 25000
        assert stats.avg_duration_days == 6.0
        assert stats.pct_of_total == pytest.approx(200 / 3)

    def test_top_funder_by_summed_spend(self):
        scored = [scored_ad(make_ad("a1", funder="A", spend=(100, 199)), [True]),
                  scored_ad(make_ad("a2", funder="A", spend=(100, 199)), [True]),
                  scored_ad(make_ad("a3", funder="B", spend=(250, 349)), [True])]
        assert bucket_stats(scored, Bucket.HIGH).top_funder == "B"

    def test_single_funder(self):
        scored = [scored_ad(make_ad("a1", funder="Only Fund"), [True])]
        assert bucket_stats(scored, Bucket.HIGH).top_funder == "Only Fund"

    def test_lexical_statistics(self):
        scored = [scored_ad(make_ad("a1", "Protect local jobs. Protect local jobs!"), [True, True]),
                  scored_ad(make_ad("a2", "Local jobs matter."), [True])]
        stats = bucket_stats(scored, Bucket.HIGH, top_k=3)
        assert stats.top_words[0][0] == "jobs"
        assert stats.top_bigrams[0] == (("jobs", "local"), 3)

    def test_demographic_profile_is_mean_over_ads(self):
        first = (Demographic("18-24", "female", 1.0),)
        second = (Demographic("18-24", "female", 0.5), Demographic("65+", "male", 0.5))
        scored = [scored_ad(make_ad("a1", demographics=first), [True]),
                  scored_ad(make_ad("a2", demographics=second), [True])]
        assert bucket_stats(scored, Bucket.HIGH).demographic_profile == (("18-24", "female", 0.75),
                                                                        ("65+", "male", 0.25))

    def test_empty_bucket(self):
        with pytest.raises(UndefinedStatisticError):
            bucket_stats([scored_ad(make_ad(), [True])], Bucket.LOW)


class TestCompareBuckets:
    def test_relative_differences(self):
        scored = [scored_ad(make_ad("h", spend=(393.6, 393.6), impressions=(25407, 25407)), [True]),
                  scored_ad(make_ad("l", spend=(265.6, 265.6), impressions=(17441, 17441)), [False])]
        comparison = compare_buckets(bucket_stats(scored, Bucket.HIGH), bucket_stats(scored, Bucket.LOW))
        rows = {row.metric: row.relative_diff_pct for row in comparison.rows}
        assert rows["avg_impressions"] == pytest.approx(45.67, abs=0.01)
        assert rows["avg_spend"] == pytest.approx(48.19, abs=0.01)
        assert rows["avg_duration_days"] == 0.0
        assert comparison.to_dict()["available"] is True

    def test_identical_buckets(self):
        scored = [scored_ad(make_ad("h"), [True]), scored_ad(make_ad("l"), [False])]
        comparison = compare_buckets(bucket_stats(scored, Bucket.HIGH), bucket_stats(scored, Bucket.LOW))
        assert all(row.relative_diff_pct == 0.0 for row in comparison.rows)

    def test_zero_low_mean_is_undefined(self):
        assert relative_diff_pct(5.0, 0.0) is None


class TestMovingAverage:
    def test_partial_head_windows(self):
        np.testing.assert_allclose(moving_average([1, 2, 3, 4], 3), [1, 1.5, 2, 3])

    def test_constant_series(self):
        np.testing.assert_allclose(moving_average([7.0] * 6, 3), 7.0)

    def test_window_one_is_identity(self):
        np.testing.assert_array_equal(moving_average([3, 1, 2], 1), [3, 1, 2])

    def test_invalid_window(self):
        with pytest.raises(ConfigError):
            moving_average([1, 2], 0)


class TestDailySeries:
    def test_one_ad_over_three_days(self):
        scored = [scored_ad(make_ad(start=MAY, end=MAY + timedelta(days=2), spend=(100, 199)), [True])]
        series = daily_series(scored, Bucket.HIGH)
        assert series.dates == (MAY, MAY + timedelta(days=1), MAY + timedelta(days=2))
        np.testing.assert_array_equal(series.series("ad_count"), [1, 1, 1])
        np.testing.assert_allclose(series.series("mean_spend"), 149.5 / 3)
        np.testing.assert_allclose(series.series("spend_lo"), 100 / 3)

    def test_total_count_equals_summed_durations(self, rng):
        scored = []
        for i in range(30):
            start = MAY + timedelta(days=int(rng.integers(0, 20)))
            end = start + timedelta(days=int(rng.integers(0, 10)))
            scored.append(scored_ad(make_ad(f"a{i}", start=start, end=end), [True]))
        series = daily_series(scored, Bucket.HIGH)
        assert series.series("ad_count").sum() == sum(s.ad.duration_days for s in scored)

    def test_days_without_ads_are_zero(self):
        scored = [scored_ad(make_ad("a1", start=MAY, end=MAY), [True]),
                  scored_ad(make_ad("a2", start=MAY + timedelta(days=2), end=MAY + timedelta(days=2)), [True])]
        series = daily_series(scored, Bucket.HIGH, window=1)
        np.testing.assert_array_equal(series.series("ad_count"), [1, 0, 1])
        assert series.series("mean_impressions")[1] == 0.0

    def test_created_attribution(self):
        scored = [scored_ad(make_ad(start=MAY, end=MAY + timedelta(days=4), spend=(100, 199)), [True])]
        series = daily_series(scored, Bucket.HIGH, attribution="created")
        assert series.dates == (MAY,)
        assert series.series("total_spend")[0] == 149.5

    def test_smoothed_series(self):
        scored = [scored_ad(make_ad(start=MAY + timedelta(days=d), end=MAY + timedelta(days=d)), [True])
                  for d in range(4)]
        series = daily_series(scored, Bucket.HIGH, window=3)
        np.testing.assert_allclose(series.series("ad_count", smoothed=True), [1, 1, 1, 1])

    def test_frame_columns(self):
        frame = daily_series([scored_ad(make_ad(), [True])], None).to_frame()
        assert list(frame.columns[:9]) == ["date", "bucket", "mean_spend", "spend_lo", "spend_hi",
                                           "mean_impressions", "impr_lo", "impr_hi", "ad_count"]
        assert "mean_spend_smoothed" in frame.columns
        assert frame["bucket"].tolist() == ["all"]

    def test_even_window(self):
        with pytest.raises(ConfigError):
            daily_series([scored_ad(make_ad(), [True])], Bucket.HIGH, window=2)

    def test_empty_bucket(self):
        with pytest.raises(UndefinedStatisticError):
            daily_series([scored_ad(make_ad(), [True])], Bucket.LOW)


class TestMannKendall:
    def test_increasing_five(self):
        result = mann_kendall([1, 2, 3, 4, 5])
        assert result.S == 10
        assert result.var_S == pytest.approx(50 / 3)
        assert result.Z == pytest.approx(9 / math.sqrt(50 / 3))
        assert result.p_two_sided == pytest.approx(0.0275, abs=5e-4)
        assert result.direction is Trend.INCREASING

    def test_constant_series(self):
        result = mann_kendall([3.0] * 8)
        assert (result.S, result.p_two_sided, result.direction) == (0, 1.0, Trend.NONE)

    def test_reverse_negates(self, rng):
        x = rng.normal(size=15)
        forward, backward = mann_kendall(x), mann_kendall(x[::-1])
        assert backward.S == -forward.S
        assert abs(backward.Z) == pytest.approx(abs(forward.Z))

    @pytest.mark.parametrize("n", [10, 25])
    def test_strictly_monotone_detected(self, n):
        assert mann_kendall(np.arange(n) ** 1.5).direction is Trend.INCREASING
        assert mann_kendall(-np.arange(n, dtype=float)).direction is Trend.DECREASING

    def test_agrees_with_brute_force(self, rng):
        for _ in range(200):
            n = int(rng.integers(4, 13))
            x = rng.integers(0, 4, size=n).astype(float)
            result = mann_kendall(x)
            assert result.S == brute_force_s(x)
            assert abs(result.S) <= n * (n - 1) / 2
            _, counts = np.unique(x, return_counts=True)
            var_s = (n * (n - 1) * (2 * n + 5) - sum(t * (t - 1) * (2 * t + 5) for t in counts)) / 18
            assert result.var_S == pytest.approx(var_s)
            assert (result.direction is Trend.NONE) == (result.p_two_sided >= result.alpha)

    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_exhaustive_three_valued_series(self, n):
        for values in itertools.product((0, 1, 2), repeat=n):
            assert mann_kendall(values).S == brute_force_s(values)

    def test_too_short(self):
        with pytest.raises(ConfigError):
            mann_kendall([1, 2, 3])

    def test_alpha_range(self):
        with pytest.raises(ConfigError):
            mann_kendall([1, 2, 3, 4], alpha=1.0)


class TestPearson:
    def test_affine_positive(self, rng):
        x = rng.normal(size=20)
        assert pearson(x, 2 * x + 1).r == pytest.approx(1.0, abs=1e-12)

    def test_affine_negative(self):
        result = pearson([1, 2, 3, 4], [-1, -2, -3, -4])
        assert result.r == pytest.approx(-1.0, abs=1e-12)

    def test_hand_computed(self):
        result = pearson([1, 2, 3, 4], [2, 1, 4, 3])
        assert result.r == pytest.approx(0.6)
        assert result.p_two_sided == pytest.approx(0.4, abs=1e-9)

    def test_constant_input(self):
        with pytest.raises(UndefinedStatisticError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            pearson([1, 2, 3], [1, 2, 3, 4])


class TestGrowthAndReports:
    DATES = tuple(MAY + timedelta(days=d) for d in range(5))

    def test_growth_ratio(self):
        result = growth_ratio(self.DATES, [1, 2, 5, 3, 4], self.DATES[1])
        assert (result.peak_date, result.peak_value, result.ratio) == (self.DATES[2], 5.0, 2.5)

    def test_growth_from_zero(self):
        assert growth_ratio(self.DATES, [0, 0, 1, 0, 0], self.DATES[0]).ratio is None

    def test_reference_outside_series(self):
        with pytest.raises(ConfigError):
            growth_ratio(self.DATES, [1, 2, 3, 4, 5], MAY - timedelta(days=1))

    def test_trend_report_marks_undefined_statistics(self):
        scored = [scored_ad(make_ad(start=MAY, end=MAY + timedelta(days=5)), [True])]
        report = trend_report([daily_series(scored, Bucket.HIGH)], alpha=0.05)
        entry = report["buckets"]["high"]
        assert entry["trends"]["ad_count_raw"]["direction"] == "none"
        assert "undefined" in entry["correlation"]["raw"]

    def test_trend_report_detects_growth(self):
        scored = [scored_ad(make_ad(f"a{d}", start=MAY + timedelta(days=d), end=MAY + timedelta(days=20)), [True])
                  for d in range(20)]
        entry = trend_report([daily_series(scored, None)], alpha=0.05)["buckets"]["all"]
        assert entry["trends"]["ad_count_raw"]["direction"] == "increasing"
        assert entry["correlation"]["raw"]["r"] > 0.9

    def test_plot_frame_is_long(self):
        series = daily_series([scored_ad(make_ad(start=MAY, end=MAY + timedelta(days=2)), [True])], Bucket.HIGH)
        frame = plot_frame([series])
        assert list(frame.columns) == ["date", "bucket", "metric", "variant", "value"]
        assert len(frame) == 3 * 9 * 2
