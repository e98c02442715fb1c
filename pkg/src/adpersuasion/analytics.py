#     Adpersuasion detects persuasive text and analyses political advertising.
#
#     Copyright (C) 2024  Adpersuasion contributors
#
#     This program is free software: you can redistribute it and/or modify
#     it under the terms of the GNU General Public License as published by
#     the Free Software Foundation, either version 3 of the License, or
#     (at your option) any later version.
#
#     This program is distributed in the hope that it will be useful,
#     but WITHOUT ANY WARRANTY; without even the implied warranty of
#     MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#     GNU General Public License for more details.
#
#     You should have received a copy of the GNU General Public License
#     along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Political-ad analytics: per-ad persuasion scores, high/mid/low buckets, bucket statistics and
lexical comparison, daily time series with trailing moving averages, Mann-Kendall trend tests
and Pearson correlation.
"""

from collections import defaultdict
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Optional, Sequence
import math
import re

import numpy as np
import pandas as pd
from scipy import stats

from adpersuasion.corpus import AD_COLUMNS, AdRecord, ad_to_row, load_ads
from adpersuasion.errors import ConfigError, InputFormatError, ShapeMismatchError, UndefinedStatisticError
from adpersuasion.features import (Featurizer, PrepConfig, average_tfidf, build_vocabulary, preprocess,
                                   top_ngrams)
from adpersuasion.log import get_logger
from adpersuasion.model import LinearModel, Target, apply_threshold, collapse_to_binary, predict_proba

log = get_logger()


class Bucket(str, Enum):
    HIGH = "high"
    MID = "mid"
    LOW = "low"


@dataclass(frozen=True)
class BucketThresholds:
    """
    Scores >= high are high persuasion, scores <= low are low persuasion, the rest is mid.
    """
    high: float = 0.8
    low: float = 0.2

    def __post_init__(self):
        if not 0.0 <= self.low < self.high <= 1.0:
            raise ConfigError(f"bucket bounds must satisfy 0 <= low < high <= 1, got {self.low}, {self.high}")

    def assign(self, score: float) -> Bucket:
        if score >= self.high:
            return Bucket.HIGH
        if score <= self.low:
            return Bucket.LOW
        return Bucket.MID


def assign_bucket(score: float, thresholds: BucketThresholds = BucketThresholds()) -> Bucket:
    return thresholds.assign(score)


# ---------------------------------------------------------------- sentence splitting

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")


@lru_cache(maxsize=None)
def default_abbreviations() -> frozenset[str]:
    text = resources.files("adpersuasion").joinpath("resources", "abbreviations_en.txt").read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines()
                     if line.strip() and not line.startswith("#"))


def split_sentences(text: str, abbreviations: Optional[frozenset[str]] = None) -> list[str]:
    """
    Splits on '.', '!' or '?' runs followed by whitespace or the end of text.
    A single '.' after a listed abbreviation or a one-letter initial does not end a sentence.
    Pieces without any letter or digit are dropped.
    :param text: ad text.
    :param abbreviations: lowercase abbreviations without their final dot, shipped list when omitted.
    :return: sentences in text order.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    pieces, start = [], 0
    for match in _SENTENCE_END.finditer(text):
        if match.group() == ".":
            words = text[start:match.start()].split()
            word = words[-1].lstrip("([{\"'").lower() if words else ""
            if word in abbreviations or (len(word) == 1 and word.isalpha()):
                continue
        pieces.append(text[start:match.end()].strip())
        start = match.end()
    pieces.append(text[start:].strip())
    return [p for p in pieces if any(ch.isalnum() for ch in p)]


# ---------------------------------------------------------------- scoring

@dataclass(frozen=True)
class ScoredAd:
    ad: AdRecord
    n_sentences: int
    n_persuasive: int
    score: float
    bucket: Bucket

    def __post_init__(self):
        if self.n_sentences < 1 or not 0 <= self.n_persuasive <= self.n_sentences:
            raise ConfigError(f"ad {self.ad.ad_id}: invalid sentence counts "
                              f"{self.n_persuasive}/{self.n_sentences}")


def scored_ad(ad: AdRecord, flags: Sequence[bool], thresholds: BucketThresholds = BucketThresholds()) -> ScoredAd:
    """
    :param ad: the ad.
    :param flags: one persuasive flag per sentence, at least one.
    :param thresholds: bucket bounds.
    """
    if not len(flags):
        raise ConfigError(f"ad {ad.ad_id} has no sentences")
    n_persuasive = int(sum(bool(f) for f in flags))
    score = n_persuasive / len(flags)
    return ScoredAd(ad, len(flags), n_persuasive, score, thresholds.assign(score))


def score_ads(ads: Sequence[AdRecord], model: LinearModel, threshold: float = 0.5,
              thresholds: BucketThresholds = BucketThresholds(), featurizer: Optional[Featurizer] = None,
              splitter: Callable[[str], list[str]] = split_sentences) -> list[ScoredAd]:
    """
    Classifies every sentence of every ad and buckets the ads by their persuasive share.
    A technique model counts a sentence as persuasive when any technique reaches the threshold.
    Ads without extractable sentences are left out.
    :param ads: ads to score.
    :param model: trained binary or technique model.
    :param threshold: probability threshold.
    :param thresholds: bucket bounds.
    :param featurizer: overrides the model's own featurizer.
    :param splitter: sentence splitter.
    :return: scored ads in input order.
    """
    featurizer = featurizer if featurizer is not None else model.featurizer
    if featurizer is None:
        raise ConfigError("no featurizer available for scoring")
    sentences_per_ad = [splitter(ad.text) for ad in ads]
    flat = [s for sentences in sentences_per_ad for s in sentences]
    if flat:
        P = predict_proba(model, featurizer.transform(flat))
        if model.target is Target.BINARY:
            flags = apply_threshold(P, threshold)[:, 0]
        else:
            flags = collapse_to_binary(P, threshold)
    else:
        flags = np.zeros(0, dtype=np.int64)

    scored, offset, excluded = [], 0, 0
    for ad, sentences in zip(ads, sentences_per_ad):
        if not sentences:
            excluded += 1
            continue
        scored.append(scored_ad(ad, flags[offset:offset + len(sentences)], thresholds))
        offset += len(sentences)
    if excluded:
        log.warning("ads without extractable sentences were excluded", excluded=excluded)
    log.info("scored ads", n=len(scored), **bucket_counts(scored))
    return scored


def bucket_counts(scored: Sequence[ScoredAd]) -> dict[str, int]:
    counts = {b.value: 0 for b in Bucket}
    for s in scored:
        counts[s.bucket.value] += 1
    return counts


def avg_sentences_per_ad(scored: Sequence[ScoredAd]) -> float:
    if not scored:
        raise UndefinedStatisticError("no scored ads")
    return sum(s.n_sentences for s in scored) / len(scored)


SCORE_COLUMNS = ("n_sentences", "n_persuasive", "score", "bucket")


def write_scored_ads(path: str | Path, scored: Sequence[ScoredAd]):
    rows = []
    for s in scored:
        row = ad_to_row(s.ad)
        row.update({"n_sentences": s.n_sentences, "n_persuasive": s.n_persuasive,
                    "score": repr(s.score), "bucket": s.bucket.value})
        rows.append(row)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows)
    if frame.empty:
        frame = pd.DataFrame(columns=list(AD_COLUMNS) + list(SCORE_COLUMNS))
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def load_scored_ads(path: str | Path, thresholds: BucketThresholds = BucketThresholds()) -> list[ScoredAd]:
    """
    Reads scored_ads.csv; scores and buckets are recomputed from the sentence counts.
    """
    ads = load_ads(path)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [c for c in SCORE_COLUMNS if c not in frame.columns]
    if missing:
        raise InputFormatError(f"missing column(s): {', '.join(missing)}", str(path))
    scored = []
    for position, (ad, n_sentences, n_persuasive) in enumerate(
            zip(ads, frame["n_sentences"], frame["n_persuasive"])):
        try:
            n, k = int(n_sentences), int(n_persuasive)
        except ValueError:
            raise InputFormatError("sentence counts must be integers", str(path), position + 2) from None
        scored.append(scored_ad(ad, [True] * k + [False] * (n - k), thresholds))
    return scored


# ---------------------------------------------------------------- bucket statistics

@dataclass(frozen=True)
class BucketStats:
    bucket: Bucket
    n_ads: int
    pct_of_total: float
    avg_impressions: float
    avg_spend: float
    avg_duration_days: float
    avg_sentences: float
    top_funder: Optional[str]
    top_words: tuple[tuple[str, float], ...]
    top_bigrams: tuple[tuple[tuple[str, ...], int], ...]
    demographic_profile: tuple[tuple[str, str, float], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "bucket": self.bucket.value,
            "n_ads": self.n_ads,
            "pct_of_total": self.pct_of_total,
            "avg_impressions": self.avg_impressions,
            "avg_spend": self.avg_spend,
            "avg_duration_days": self.avg_duration_days,
            "avg_sentences": self.avg_sentences,
            "top_funder": self.top_funder,
            "top_words": [[term, score] for term, score in self.top_words],
            "top_bigrams": [[" ".join(gram), count] for gram, count in self.top_bigrams],
            "demographic_profile": [{"age_bucket": a, "gender": g, "fraction": f}
                                    for a, g, f in self.demographic_profile],
        }


def top_funder(ads: Sequence[AdRecord]) -> Optional[str]:
    """Funder with the largest summed mid-point spend, ties to the lexicographically smallest name."""
    spend = defaultdict(float)
    for ad in ads:
        spend[ad.funder] += ad.spend_mid
    if not spend:
        return None
    return min(spend, key=lambda name: (-spend[name], name))


def demographic_profile(ads: Sequence[AdRecord]) -> tuple[tuple[str, str, float], ...]:
    """
    Mean audience fraction per (age bucket, gender) over the ads that report demographics.
    """
    with_demographics = [ad for ad in ads if ad.demographics]
    if not with_demographics:
        return ()
    totals = defaultdict(float)
    for ad in with_demographics:
        for d in ad.demographics:
            totals[(d.age_bucket, d.gender)] += d.fraction
    n = len(with_demographics)
    return tuple((age, gender, totals[(age, gender)] / n) for age, gender in sorted(totals))


def bucket_stats(scored: Sequence[ScoredAd], bucket: Bucket, prep: Optional[PrepConfig] = None,
                 top_k: int = 10, bigrams_after_stopwords: bool = True) -> BucketStats:
    """
    :param scored: all scored ads; the bucket share is relative to them.
    :param bucket: bucket to describe.
    :param prep: preprocessing for the lexical statistics, analysis defaults when omitted.
    :param top_k: number of top words and bigrams.
    :param bigrams_after_stopwords: count bigrams on stopword-filtered tokens.
    """
    members = [s for s in scored if s.bucket == bucket]
    if not members:
        raise UndefinedStatisticError(f"bucket {bucket.value} has no ads")
    prep = prep if prep is not None else PrepConfig.for_analysis()
    ads = [s.ad for s in members]
    n = len(members)

    docs = [preprocess(ad.text, prep) for ad in ads]
    vocab = build_vocabulary(docs)
    if bigrams_after_stopwords:
        bigram_docs = docs
    else:
        unfiltered = replace(prep, remove_stopwords=False)
        bigram_docs = [preprocess(ad.text, unfiltered) for ad in ads]

    return BucketStats(
        bucket=bucket,
        n_ads=n,
        pct_of_total=100.0 * n / len(scored),
        avg_impressions=math.fsum(ad.impressions_mid for ad in ads) / n,
        avg_spend=math.fsum(ad.spend_mid for ad in ads) / n,
        avg_duration_days=sum(ad.duration_days for ad in ads) / n,
        avg_sentences=sum(s.n_sentences for s in members) / n,
        top_funder=top_funder(ads),
        top_words=tuple(average_tfidf(docs, vocab, top_k)),
        top_bigrams=tuple(top_ngrams(bigram_docs, 2, top_k)),
        demographic_profile=demographic_profile(ads),
    )


COMPARED_METRICS = ("avg_impressions", "avg_spend", "avg_duration_days")


@dataclass(frozen=True)
class MetricComparison:
    metric: str
    high: float
    low: float
    relative_diff_pct: Optional[float]


@dataclass(frozen=True)
class BucketComparison:
    high: BucketStats
    low: BucketStats
    rows: tuple[MetricComparison, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "available": True,
            "high": self.high.to_dict(),
            "low": self.low.to_dict(),
            "metrics": [{"metric": r.metric, "high": r.high, "low": r.low,
                         "relative_diff_pct": r.relative_diff_pct} for r in self.rows],
        }


def relative_diff_pct(high: float, low: float) -> Optional[float]:
    """(high - low) / low in percent, None when low is zero."""
    if low == 0:
        return None
    return (high - low) / low * 100.0


def compare_buckets(high: BucketStats, low: BucketStats) -> BucketComparison:
    rows = tuple(MetricComparison(name, getattr(high, name), getattr(low, name),
                                  relative_diff_pct(getattr(high, name), getattr(low, name)))
                 for name in COMPARED_METRICS)
    return BucketComparison(high, low, rows)


# ---------------------------------------------------------------- time series

class Attribution(str, Enum):
    ACTIVE = "active"
    CREATED = "created"


SERIES_METRICS = ("mean_spend", "spend_lo", "spend_hi", "mean_impressions", "impr_lo", "impr_hi",
                  "ad_count", "total_spend", "total_impressions")


def moving_average(values: Any, window: int) -> np.ndarray:
    """
    Trailing mean over the last `window` values; the first entries average what is available.
    """
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    values = np.asarray(values, dtype=np.float64)
    return pd.Series(values).rolling(window, min_periods=1).mean().to_numpy()


@dataclass(frozen=True, eq=False)
class DailySeries:
    """
    Per-day aggregates of one bucket, or of all ads when bucket is None.
    Days without contributing ads carry zeros.
    """
    bucket: Optional[Bucket]
    dates: tuple[date, ...]
    window: int
    attribution: Attribution
    raw: dict[str, np.ndarray] = field(default_factory=dict)
    smoothed: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.bucket.value if self.bucket is not None else "all"

    def series(self, metric: str, smoothed: bool = False) -> np.ndarray:
        source = self.smoothed if smoothed else self.raw
        if metric not in source:
            raise ConfigError(f"unknown series metric {metric!r}")
        return source[metric]

    def to_frame(self) -> pd.DataFrame:
        data = {"date": [d.isoformat() for d in self.dates], "bucket": self.name}
        for metric in SERIES_METRICS:
            data[metric] = self.raw[metric]
        for metric in SERIES_METRICS:
            data[f"{metric}_smoothed"] = self.smoothed[metric]
        return pd.DataFrame(data)


def _contribution_days(ad: AdRecord, attribution: Attribution) -> tuple[date, date]:
    if attribution is Attribution.ACTIVE:
        return ad.start_date, ad.end_date
    return ad.created, ad.created


def daily_series(scored: Sequence[ScoredAd], bucket: Optional[Bucket] = None, window: int = 3,
                 attribution: Attribution | str = Attribution.ACTIVE,
                 start: Optional[date] = None, end: Optional[date] = None) -> DailySeries:
    """
    Builds the daily series of a bucket.
    With active attribution an ad contributes its mid-point spend and impressions divided by its
    duration to each day it ran; with created attribution the whole amount lands on its creation day.
    Mean series divide the day's summed contributions by the number of contributing ads.
    :param scored: scored ads.
    :param bucket: bucket to aggregate, all ads when None.
    :param window: odd moving average window.
    :param attribution: "active" or "created".
    :param start: first day, earliest contribution when omitted.
    :param end: last day, latest contribution when omitted.
    """
    if window < 1 or window % 2 == 0:
        raise ConfigError(f"window must be a positive odd number, got {window}")
    try:
        attribution = Attribution(attribution)
    except ValueError:
        raise ConfigError(f"unknown attribution {attribution!r}") from None
    ads = [s.ad for s in scored if bucket is None or s.bucket == bucket]
    if not ads:
        raise UndefinedStatisticError(f"no ads in bucket {bucket.value if bucket else 'all'}")

    spans = [_contribution_days(ad, attribution) for ad in ads]
    start = start if start is not None else min(s for s, _ in spans)
    end = end if end is not None else max(e for _, e in spans)
    if end < start:
        raise ConfigError(f"series end {end} before start {start}")
    n_days = (end - start).days + 1
    dates = tuple(start + timedelta(days=i) for i in range(n_days))

    count = np.zeros(n_days, dtype=np.int64)
    sums = {name: np.zeros(n_days) for name in ("spend_mid", "spend_lo", "spend_hi",
                                                "impr_mid", "impr_lo", "impr_hi")}
    for ad, (first, last) in zip(ads, spans):
        lo = max((first - start).days, 0)
        hi = min((last - start).days, n_days - 1)
        if hi < lo:
            continue
        days = (last - first).days + 1
        count[lo:hi + 1] += 1
        for name, value in (("spend_mid", ad.spend_mid), ("spend_lo", ad.spend_lo),
                            ("spend_hi", ad.spend_hi), ("impr_mid", ad.impressions_mid),
                            ("impr_lo", ad.impressions_lo), ("impr_hi", ad.impressions_hi)):
            sums[name][lo:hi + 1] += value / days

    def mean(values: np.ndarray) -> np.ndarray:
        return np.divide(values, count, out=np.zeros(n_days), where=count > 0)

    raw = {
        "mean_spend": mean(sums["spend_mid"]),
        "spend_lo": mean(sums["spend_lo"]),
        "spend_hi": mean(sums["spend_hi"]),
        "mean_impressions": mean(sums["impr_mid"]),
        "impr_lo": mean(sums["impr_lo"]),
        "impr_hi": mean(sums["impr_hi"]),
        "ad_count": count.astype(np.float64),
        "total_spend": sums["spend_mid"],
        "total_impressions": sums["impr_mid"],
    }
    smoothed = {name: moving_average(values, window) for name, values in raw.items()}
    return DailySeries(bucket, dates, window, attribution, raw, smoothed)


# ---------------------------------------------------------------- trend statistics

class Trend(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    NONE = "none"


@dataclass(frozen=True)
class TrendResult:
    n: int
    S: int
    var_S: float
    Z: float
    p_two_sided: float
    alpha: float
    direction: Trend

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "S": self.S, "var_S": self.var_S, "Z": self.Z,
                "p_two_sided": self.p_two_sided, "alpha": self.alpha, "direction": self.direction.value}


def _finite_vector(values: Any, what: str) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeMismatchError(f"{what} must be one-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputFormatError(f"{what} contains non-finite values")
    return x


def mann_kendall(series: Any, alpha: float = 0.05) -> TrendResult:
    """
    Mann-Kendall monotonic trend test with tie-corrected variance and continuity correction.
    :param series: at least four finite values in time order.
    :param alpha: significance level.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    x = _finite_vector(series, "series")
    n = x.size
    if n < 4:
        raise ConfigError(f"Mann-Kendall needs at least 4 values, got {n}")

    i, j = np.triu_indices(n, 1)
    S = int(np.sign(x[j] - x[i]).sum())
    _, counts = np.unique(x, return_counts=True)
    ties = counts[counts > 1].astype(np.float64)
    var_s = (n * (n - 1) * (2 * n + 5) - float(np.sum(ties * (ties - 1) * (2 * ties + 5)))) / 18.0

    if var_s <= 0:
        return TrendResult(n, S, 0.0, 0.0, 1.0, alpha, Trend.NONE)
    if S > 0:
        z = (S - 1) / math.sqrt(var_s)
    elif S < 0:
        z = (S + 1) / math.sqrt(var_s)
    else:
        z = 0.0
    p = min(1.0, 2.0 * float(stats.norm.sf(abs(z))))
    if p < alpha:
        direction = Trend.INCREASING if S > 0 else Trend.DECREASING
    else:
        direction = Trend.NONE
    return TrendResult(n, S, var_s, z, p, alpha, direction)


@dataclass(frozen=True)
class PearsonResult:
    n: int
    r: float
    p_two_sided: float

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "r": self.r, "p_two_sided": self.p_two_sided}


def pearson(x: Any, y: Any) -> PearsonResult:
    """
    Pearson correlation with a two-sided t-test p-value on n - 2 degrees of freedom.
    """
    x = _finite_vector(x, "x")
    y = _finite_vector(y, "y")
    if x.size != y.size:
        raise ShapeMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    n = x.size
    if n < 3:
        raise ConfigError(f"Pearson correlation needs at least 3 pairs, got {n}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise UndefinedStatisticError("Pearson correlation is undefined for a constant series")
    r = float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))
    if abs(r) == 1.0:
        return PearsonResult(n, r, 0.0)
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = float(2.0 * stats.t.sf(abs(t), n - 2))
    return PearsonResult(n, r, min(p, 1.0))


@dataclass(frozen=True)
class GrowthResult:
    reference_date: date
    reference_value: float
    peak_date: date
    peak_value: float
    ratio: Optional[float]

    def to_dict(self) -> dict[str, Any]:
        return {"reference_date": self.reference_date.isoformat(), "reference_value": self.reference_value,
                "peak_date": self.peak_date.isoformat(), "peak_value": self.peak_value, "ratio": self.ratio}


def growth_ratio(dates: Sequence[date], values: Any, reference: date) -> GrowthResult:
    """
    Ratio of the peak value on or after the reference day to the reference day's value.
    The earliest day wins a tied peak; ratio is None when the reference value is zero.
    """
    values = _finite_vector(values, "values")
    if len(dates) != values.size:
        raise ShapeMismatchError(f"{len(dates)} dates for {values.size} values")
    try:
        position = list(dates).index(reference)
    except ValueError:
        raise ConfigError(f"reference date {reference} is outside the series") from None
    peak = position + int(np.argmax(values[position:]))
    ref_value, peak_value = float(values[position]), float(values[peak])
    ratio = peak_value / ref_value if ref_value != 0 else None
    return GrowthResult(reference, ref_value, dates[peak], peak_value, ratio)


TREND_METRICS = ("mean_spend", "mean_impressions", "ad_count")


def trend_report(series: Sequence[DailySeries], alpha: float = 0.05) -> dict[str, Any]:
    """
    Mann-Kendall tests of the trend metrics on raw and smoothed series of every bucket, and the
    correlation of daily total spend with daily total impressions.
    Statistics that cannot be computed are reported with the reason instead of a result.
    """
    report = {"alpha": alpha, "buckets": {}}
    for daily in series:
        entry = {"window": daily.window, "attribution": daily.attribution.value,
                 "n_days": len(daily.dates), "trends": {}, "correlation": {}}
        for variant, smoothed in (("raw", False), ("smoothed", True)):
            for metric in TREND_METRICS:
                key = f"{metric}_{variant}"
                try:
                    entry["trends"][key] = mann_kendall(daily.series(metric, smoothed), alpha).to_dict()
                except (ConfigError, UndefinedStatisticError) as e:
                    entry["trends"][key] = {"undefined": str(e)}
            try:
                entry["correlation"][variant] = pearson(daily.series("total_spend", smoothed),
                                                        daily.series("total_impressions", smoothed)).to_dict()
            except (ConfigError, UndefinedStatisticError) as e:
                entry["correlation"][variant] = {"undefined": str(e)}
        report["buckets"][daily.name] = entry
        log.debug("trend report", bucket=daily.name, days=len(daily.dates))
    return report


def plot_frame(series: Sequence[DailySeries]) -> pd.DataFrame:
    """
    Long table for plotting: one row per (date, bucket, metric, variant).
    """
    frames = []
    for daily in series:
        for variant, source in (("raw", daily.raw), ("smoothed", daily.smoothed)):
            for metric in SERIES_METRICS:
                frames.append(pd.DataFrame({"date": [d.isoformat() for d in daily.dates], "bucket": daily.name,
                                            "metric": metric, "variant": variant, "value": source[metric]}))
    if not frames:
        return pd.DataFrame(columns=["date", "bucket", "metric", "variant", "value"])
    return pd.concat(frames, ignore_index=True)
