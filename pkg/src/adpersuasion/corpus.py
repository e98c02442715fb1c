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
Sentence-level and ad-level corpora: data model, JSONL/CSV ingestion, binarization,
stratified splitting, descriptive statistics and synthetic generation.
"""

from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence
import hashlib
import json
import math

import numpy as np
import pandas as pd

from adpersuasion.errors import (ConfigError, DuplicateRecordError, InputFormatError, MissingArtifactError,
                                 StratificationError, UnknownLabelError)
from adpersuasion.log import get_logger

log = get_logger()

AD_COLUMNS = ("ad_id", "text", "funder", "created", "start_date", "end_date",
              "spend_lo", "spend_hi", "impressions_lo", "impressions_hi", "demographics")
"""Header of the ad CSV, in file order."""

DEMOGRAPHIC_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TechniqueLabel:
    id: int
    name: str


class LabelSchema:
    """
    Ordered set of technique labels. The position of a name is its label id.
    """

    def __init__(self, names: Sequence[str]):
        """
        :param names: technique names, array index is the label id.
        """
        names = tuple(names)
        if not names:
            raise ConfigError("label schema needs at least one label")
        if any(not isinstance(name, str) or not name for name in names):
            raise ConfigError("label names must be non-empty strings")
        if len(set(names)) != len(names):
            raise ConfigError("label names must be unique")
        self.labels = tuple(TechniqueLabel(i, name) for i, name in enumerate(names))
        self._index = {name: i for i, name in enumerate(names)}
        self.schema_id = hashlib.sha256("\n".join(names).encode("utf-8")).hexdigest()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(label.name for label in self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabelSchema) and other.names == self.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"LabelSchema({len(self)} labels, {self.schema_id[:12]})"

    def index(self, name: str) -> int:
        """
        :param name: technique name.
        :return: label id.
        :raises UnknownLabelError: name is not part of the schema.
        """
        try:
            return self._index[name]
        except KeyError:
            raise UnknownLabelError(name) from None

    def name(self, label_id: int) -> str:
        return self.labels[label_id].name

    @classmethod
    def from_file(cls, path: str | Path) -> "LabelSchema":
        """
        Loads a schema from a JSON array of technique names.
        """
        path = Path(path)
        if not path.exists():
            raise MissingArtifactError(f"label schema not found: {path}")
        try:
            names = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as ex:
            raise InputFormatError(f"malformed label schema: {ex.msg}", str(path)) from ex
        if not isinstance(names, list):
            raise InputFormatError("label schema must be a JSON array of names", str(path))
        return cls(names)

    def to_file(self, path: str | Path):
        Path(path).write_text(json.dumps(list(self.names), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def semeval(cls) -> "LabelSchema":
        """The 23 persuasion techniques of the news-article benchmark."""
        text = resources.files("adpersuasion").joinpath("resources", "semeval23_labels.json").read_text("utf-8")
        return cls(json.loads(text))

    @classmethod
    def synthetic(cls, n_labels: int) -> "LabelSchema":
        return cls([f"technique_{k:02d}" for k in range(n_labels)])


class BinaryLabel(str, Enum):
    NEUTRAL = "neutral"
    PERSUASIVE = "persuasive"


@dataclass(frozen=True)
class LabeledSentence:
    """
    One sentence with its technique label ids and an optional binary label.
    """
    doc_id: str
    sentence_id: int
    text: str
    labels: frozenset[int] = frozenset()
    binary: Optional[BinaryLabel] = None

    def __post_init__(self):
        if isinstance(self.sentence_id, bool) or not isinstance(self.sentence_id, int) or self.sentence_id < 0:
            raise InputFormatError(f"sentence_id must be a non-negative integer, got {self.sentence_id!r}")
        object.__setattr__(self, "labels", frozenset(self.labels))
        if self.binary is not None and not isinstance(self.binary, BinaryLabel):
            try:
                object.__setattr__(self, "binary", BinaryLabel(self.binary))
            except ValueError:
                raise InputFormatError(f"binary must be 'neutral' or 'persuasive', got {self.binary!r}") from None

    @property
    def key(self) -> tuple[str, int]:
        return self.doc_id, self.sentence_id

    @property
    def is_persuasive(self) -> bool:
        return self.binary is BinaryLabel.PERSUASIVE


@dataclass(frozen=True)
class Demographic:
    age_bucket: str
    gender: str
    fraction: float


@dataclass(frozen=True)
class AdRecord:
    """
    One political ad. Spend and impressions are the [lo, hi] ranges the ad library reports.
    """
    ad_id: str
    text: str
    funder: str
    created: date
    start_date: date
    end_date: date
    spend_lo: float
    spend_hi: float
    impressions_lo: int
    impressions_hi: int
    demographics: tuple[Demographic, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "demographics", tuple(self.demographics))
        if not (math.isfinite(self.spend_lo) and math.isfinite(self.spend_hi)):
            raise InputFormatError(f"ad {self.ad_id}: spend must be finite, got [{self.spend_lo}, {self.spend_hi}]")
        if self.spend_lo < 0 or self.impressions_lo < 0:
            raise InputFormatError(f"ad {self.ad_id}: negative spend or impressions")
        if self.spend_lo > self.spend_hi:
            raise InputFormatError(f"ad {self.ad_id}: spend_lo {self.spend_lo} > spend_hi {self.spend_hi}")
        if self.impressions_lo > self.impressions_hi:
            raise InputFormatError(
                f"ad {self.ad_id}: impressions_lo {self.impressions_lo} > impressions_hi {self.impressions_hi}")
        if self.start_date > self.end_date:
            raise InputFormatError(f"ad {self.ad_id}: end_date {self.end_date} before start_date {self.start_date}")
        if self.demographics:
            if any(not 0.0 <= d.fraction <= 1.0 for d in self.demographics):
                raise InputFormatError(f"ad {self.ad_id}: demographic fraction outside [0, 1]")
            total = math.fsum(d.fraction for d in self.demographics)
            if abs(total - 1.0) > DEMOGRAPHIC_TOLERANCE:
                raise InputFormatError(f"ad {self.ad_id}: demographic fractions sum to {total}, expected 1")

    @property
    def spend_mid(self) -> float:
        return (self.spend_lo + self.spend_hi) / 2

    @property
    def impressions_mid(self) -> float:
        return (self.impressions_lo + self.impressions_hi) / 2

    @property
    def duration_days(self) -> int:
        """Inclusive calendar days between start_date and end_date."""
        return (self.end_date - self.start_date).days + 1


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[LabeledSentence, ...]
    test: tuple[LabeledSentence, ...]
    seed: int
    test_fraction: float

    def manifest(self) -> dict[str, Any]:
        """Seed, fraction and member ids of both sides."""
        return {
            "seed": self.seed,
            "test_fraction": self.test_fraction,
            "n_train": len(self.train),
            "n_test": len(self.test),
            "train_ids": [[s.doc_id, s.sentence_id] for s in self.train],
            "test_ids": [[s.doc_id, s.sentence_id] for s in self.test],
        }


@dataclass(frozen=True)
class CorpusSummary:
    n_docs: int
    n_sentences: int
    n_chars: int
    n_annotations: int
    avg_pt: float
    label_counts: dict[str, int] = field(default_factory=dict)
    binary_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_docs": self.n_docs,
            "n_sentences": self.n_sentences,
            "n_chars": self.n_chars,
            "n_annotations": self.n_annotations,
            "avg_pt": self.avg_pt,
            "label_counts": dict(self.label_counts),
            "binary_counts": dict(self.binary_counts),
        }


@dataclass(frozen=True)
class SyntheticAdCorpus:
    """Generated ads together with the bucket each ad was planted in."""
    ads: tuple[AdRecord, ...]
    planted: tuple[str, ...]


# ---------------------------------------------------------------- sentence I/O

def _sentence_from_dict(obj: Any, schema: LabelSchema, path: str, line_number: int) -> LabeledSentence:
    if not isinstance(obj, dict):
        raise InputFormatError("expected a JSON object", path, line_number)
    for key, kind in (("doc_id", str), ("sentence_id", int), ("text", str)):
        if key not in obj:
            raise InputFormatError(f"missing field {key!r}", path, line_number)
        if not isinstance(obj[key], kind) or isinstance(obj[key], bool):
            raise InputFormatError(f"field {key!r} must be {kind.__name__}", path, line_number)
    names = obj.get("labels") or []
    if not isinstance(names, list) or any(not isinstance(n, str) for n in names):
        raise InputFormatError("field 'labels' must be an array of strings", path, line_number)
    label_ids = set()
    for name in names:
        try:
            label_ids.add(schema.index(name))
        except UnknownLabelError:
            raise UnknownLabelError(name, path, line_number) from None
    try:
        return LabeledSentence(obj["doc_id"], obj["sentence_id"], obj["text"],
                               frozenset(label_ids), obj.get("binary"))
    except InputFormatError as ex:
        raise InputFormatError(str(ex), path, line_number) from None


def load_sentences(path: str | Path, schema: LabelSchema) -> list[LabeledSentence]:
    """
    Reads a JSONL sentence corpus. Blank lines are skipped.
    :param path: JSONL file.
    :param schema: label schema used to resolve label names.
    :return: sentences in file order.
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"sentence corpus not found: {path}")
    sentences: list[LabeledSentence] = []
    seen: set[tuple[str, int]] = set()
    with path.open("r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as ex:
                raise InputFormatError(f"malformed JSON ({ex.msg})", str(path), line_number) from ex
            sentence = _sentence_from_dict(obj, schema, str(path), line_number)
            if sentence.key in seen:
                raise DuplicateRecordError(sentence.key, str(path), line_number)
            seen.add(sentence.key)
            sentences.append(sentence)
    log.debug("loaded sentences", path=str(path), n=len(sentences))
    return sentences


def sentence_to_dict(sentence: LabeledSentence, schema: LabelSchema) -> dict[str, Any]:
    return {
        "doc_id": sentence.doc_id,
        "sentence_id": sentence.sentence_id,
        "text": sentence.text,
        "labels": [schema.name(i) for i in sorted(sentence.labels)],
        "binary": sentence.binary.value if sentence.binary is not None else None,
    }


def write_sentences(path: str | Path, sentences: Iterable[LabeledSentence], schema: LabelSchema):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for sentence in sentences:
            f.write(json.dumps(sentence_to_dict(sentence, schema), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------- ad I/O

def _format_amount(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _parse_date(value: str, column: str, path: str, row: int) -> date:
    try:
        return date.fromisoformat(value.strip())
    except ValueError:
        raise InputFormatError(f"unparsable {column} {value!r}, expected YYYY-MM-DD", path, row) from None


def _parse_number(value: str, column: str, path: str, row: int, integer: bool) -> float | int:
    text = value.strip()
    try:
        return int(text) if integer else float(text)
    except ValueError:
        raise InputFormatError(f"unparsable {column} {value!r}", path, row) from None


def _parse_demographics(value: str, path: str, row: int) -> tuple[Demographic, ...]:
    if not value.strip():
        return ()
    try:
        items = json.loads(value)
        return tuple(Demographic(str(item["age_bucket"]), str(item["gender"]), float(item["fraction"]))
                     for item in items)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        raise InputFormatError("demographics must be a JSON array of "
                               "{age_bucket, gender, fraction} objects", path, row) from None


def load_ads(path: str | Path) -> list[AdRecord]:
    """
    Reads an ad CSV.
    :param path: CSV file with the AD_COLUMNS header.
    :return: parsed ads in file order.
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"ad corpus not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise InputFormatError("empty file, expected a CSV header", str(path)) from None
    except pd.errors.ParserError as ex:
        raise InputFormatError(f"malformed CSV ({ex})", str(path)) from ex
    missing = [c for c in AD_COLUMNS if c not in frame.columns]
    if missing:
        raise InputFormatError(f"missing column(s): {', '.join(missing)}", str(path))

    ads: list[AdRecord] = []
    seen: set[str] = set()
    for position, row in enumerate(frame.itertuples(index=False)):
        line = position + 2
        record = row._asdict()
        try:
            ad = AdRecord(
                ad_id=record["ad_id"],
                text=record["text"],
                funder=record["funder"],
                created=_parse_date(record["created"], "created", str(path), line),
                start_date=_parse_date(record["start_date"], "start_date", str(path), line),
                end_date=_parse_date(record["end_date"], "end_date", str(path), line),
                spend_lo=_parse_number(record["spend_lo"], "spend_lo", str(path), line, False),
                spend_hi=_parse_number(record["spend_hi"], "spend_hi", str(path), line, False),
                impressions_lo=_parse_number(record["impressions_lo"], "impressions_lo", str(path), line, True),
                impressions_hi=_parse_number(record["impressions_hi"], "impressions_hi", str(path), line, True),
                demographics=_parse_demographics(record["demographics"], str(path), line),
            )
        except InputFormatError as ex:
            if ex.path is not None:
                raise
            raise InputFormatError(str(ex), str(path), line) from None
        if ad.ad_id in seen:
            raise DuplicateRecordError((ad.ad_id,), str(path), line)
        seen.add(ad.ad_id)
        ads.append(ad)
    log.debug("loaded ads", path=str(path), n=len(ads))
    return ads


def ad_to_row(ad: AdRecord) -> dict[str, str]:
    return {
        "ad_id": ad.ad_id,
        "text": ad.text,
        "funder": ad.funder,
        "created": ad.created.isoformat(),
        "start_date": ad.start_date.isoformat(),
        "end_date": ad.end_date.isoformat(),
        "spend_lo": _format_amount(ad.spend_lo),
        "spend_hi": _format_amount(ad.spend_hi),
        "impressions_lo": str(ad.impressions_lo),
        "impressions_hi": str(ad.impressions_hi),
        "demographics": json.dumps([{"age_bucket": d.age_bucket, "gender": d.gender, "fraction": d.fraction}
                                    for d in ad.demographics], separators=(",", ":")) if ad.demographics else "",
    }


def write_ads(path: str | Path, ads: Iterable[AdRecord]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([ad_to_row(ad) for ad in ads], columns=list(AD_COLUMNS))
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


# ---------------------------------------------------------------- transforms

def binarize(s: LabeledSentence) -> LabeledSentence:
    """
    Any technique makes a sentence persuasive. An existing persuasive label is kept.
    The technique set is left untouched.
    """
    persuasive = bool(s.labels) or s.binary is BinaryLabel.PERSUASIVE
    return replace(s, binary=BinaryLabel.PERSUASIVE if persuasive else BinaryLabel.NEUTRAL)


def _round_half_up(x: float) -> int:
    # absorbs representation error such as 0.1 * 45 = 4.499999...
    return math.floor(x + 0.5 + 1e-9)


def stratified_split(corpus: Sequence[LabeledSentence], test_fraction: float, seed: int) -> DatasetSplit:
    """
    Splits a binarized corpus into train and test, stratified by the binary label.
    Per-class test counts round half up, then the largest class absorbs the difference
    to the rounded global test size. Both sides keep the input order.
    :param corpus: sentences, each with a binary label.
    :param test_fraction: share of each class that goes to test, in (0, 1).
    :param seed: seed of the member permutation.
    :return: DatasetSplit
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if not corpus:
        raise StratificationError("cannot split an empty corpus")

    classes: dict[BinaryLabel, list[int]] = {}
    for position, sentence in enumerate(corpus):
        if sentence.binary is None:
            raise InputFormatError(f"sentence {sentence.key} has no binary label, binarize the corpus first")
        classes.setdefault(sentence.binary, []).append(position)
    for label, members in classes.items():
        if len(members) < 2:
            raise StratificationError(f"class {label.value!r} has {len(members)} member(s), cannot stratify")

    order = sorted(classes, key=lambda c: c.value)
    quota = {label: _round_half_up(len(classes[label]) * test_fraction) for label in order}
    largest = max(order, key=lambda c: (len(classes[c]), c.value))
    quota[largest] += _round_half_up(len(corpus) * test_fraction) - sum(quota.values())
    for label in order:
        quota[label] = min(max(quota[label], 1), len(classes[label]) - 1)

    rng = np.random.default_rng(seed)
    test_positions: set[int] = set()
    for label in order:
        members = classes[label]
        permutation = rng.permutation(len(members))
        test_positions.update(members[i] for i in permutation[:quota[label]])

    train = tuple(s for i, s in enumerate(corpus) if i not in test_positions)
    test = tuple(s for i, s in enumerate(corpus) if i in test_positions)
    log.info("split corpus", n_train=len(train), n_test=len(test), seed=seed)
    return DatasetSplit(train, test, seed, test_fraction)


def avg_techniques_per_doc(corpus: Sequence[LabeledSentence]) -> float:
    """
    Technique annotations per distinct document (AVG pt).
    """
    if not corpus:
        raise ConfigError("corpus is empty")
    n_docs = len({s.doc_id for s in corpus})
    return sum(len(s.labels) for s in corpus) / n_docs


def corpus_summary(corpus: Sequence[LabeledSentence], schema: LabelSchema) -> CorpusSummary:
    if not corpus:
        raise ConfigError("corpus is empty")
    label_counts = Counter(label for s in corpus for label in s.labels)
    binary_counts = Counter(s.binary.value for s in corpus if s.binary is not None)
    return CorpusSummary(
        n_docs=len({s.doc_id for s in corpus}),
        n_sentences=len(corpus),
        n_chars=sum(len(s.text) for s in corpus),
        n_annotations=sum(label_counts.values()),
        avg_pt=avg_techniques_per_doc(corpus),
        label_counts={schema.name(i): label_counts.get(i, 0) for i in range(len(schema))},
        binary_counts={b.value: binary_counts.get(b.value, 0) for b in BinaryLabel},
    )


# ---------------------------------------------------------------- synthetic data

FILLER_WORDS = (
    "council", "meeting", "road", "weekend", "library", "school", "market", "street", "project", "river",
    "community", "garden", "bus", "station", "report", "week", "office", "hall", "park", "centre",
    "morning", "service", "event", "update", "notice", "local", "town", "season", "program", "team",
    "hours", "open", "visit", "details", "plan", "building", "families", "residents", "volunteers", "sport",
)
"""Neutral vocabulary the synthetic sentences are built from."""

_MARKER_STEMS = ("zor", "vel", "kam", "tir", "bux", "quen")


def marker_vocabulary(n_labels: int) -> list[tuple[str, ...]]:
    """
    Label-specific marker tokens, disjoint across labels and from FILLER_WORDS.
    """
    return [tuple(f"{stem}{k:02d}" for stem in _MARKER_STEMS) for k in range(n_labels)]


def _check_priors(label_priors: Sequence[float]) -> np.ndarray:
    priors = np.asarray(label_priors, dtype=np.float64)
    if priors.ndim != 1 or priors.size == 0:
        raise ConfigError("label_priors must be a non-empty list")
    if not np.all((priors >= 0.0) & (priors <= 1.0)):
        raise ConfigError(f"label priors must lie in [0, 1], got {list(label_priors)}")
    return priors


def _compose_sentence(rng: np.random.Generator, planted: Sequence[int],
                      vocabulary: list[tuple[str, ...]]) -> str:
    tokens = list(rng.choice(FILLER_WORDS, size=int(rng.integers(4, 9))))
    for k in planted:
        tokens.extend(rng.choice(vocabulary[k], size=int(rng.integers(1, 4))))
    tokens = [tokens[i] for i in rng.permutation(len(tokens))]
    return " ".join(tokens).capitalize() + "."


def generate_synthetic(n_docs: int, sentences_per_doc: int, label_priors: Sequence[float],
                       seed: int) -> list[LabeledSentence]:
    """
    Generates a labeled sentence corpus with planted lexical markers.
    Label k is planted independently with probability label_priors[k];
    a planted label adds 1 to 3 of its marker tokens to the sentence.
    :param n_docs: number of documents.
    :param sentences_per_doc: sentences per document.
    :param label_priors: planting probability per label, its length is the label count.
    :param seed: generator seed.
    :return: sentences without binary labels.
    """
    priors = _check_priors(label_priors)
    if n_docs < 1 or sentences_per_doc < 1:
        raise ConfigError("n_docs and sentences_per_doc must be at least 1")
    vocabulary = marker_vocabulary(priors.size)
    rng = np.random.default_rng(seed)
    corpus = []
    for d in range(n_docs):
        for s in range(sentences_per_doc):
            planted = np.flatnonzero(rng.random(priors.size) < priors).tolist()
            text = _compose_sentence(rng, planted, vocabulary)
            corpus.append(LabeledSentence(f"synth-{d:05d}", s, text, frozenset(planted)))
    return corpus


SYNTHETIC_FUNDERS = (
    "Citizens for Better Roads", "Harbour Progress Alliance", "Northern Growers Union",
    "Future Families Fund", "Coastal Voters League", "Independent Candidate Office",
)
SYNTHETIC_AGE_BUCKETS = ("18-24", "25-34", "35-44", "45-54", "55-64", "65+")
SYNTHETIC_GENDERS = ("female", "male")
PLANTED_BUCKETS = ("high", "mid", "low")


def generate_synthetic_ads(n_ads: int, label_priors: Sequence[float], seed: int,
                           sentences_per_ad: int = 4, mix: Sequence[float] = (0.45, 0.40, 0.15),
                           start: date = date(2022, 3, 1), end: date = date(2022, 6, 18)) -> SyntheticAdCorpus:
    """
    Generates ads planted as high, mid or low persuasion in proportions `mix`.
    High ads contain only marker sentences, low ads none, mid ads half of them.
    Persuasive sentences reuse the marker vocabulary of generate_synthetic.
    :param n_ads: number of ads.
    :param label_priors: technique planting probabilities of persuasive sentences.
    :param seed: generator seed.
    :param sentences_per_ad: sentences per ad, at least 3 so a mid ad stays strictly between the bucket bounds.
    :param mix: probabilities of planting high, mid and low.
    :param start: first possible start date.
    :param end: last possible end date.
    :return: SyntheticAdCorpus
    """
    priors = _check_priors(label_priors)
    mix = np.asarray(mix, dtype=np.float64)
    if n_ads < 1 or sentences_per_ad < 3:
        raise ConfigError("n_ads must be at least 1 and sentences_per_ad at least 3")
    if mix.shape != (3,) or np.any(mix < 0) or not math.isclose(mix.sum(), 1.0):
        raise ConfigError("mix must be three non-negative probabilities summing to 1")
    span = (end - start).days + 1
    if span < 1:
        raise ConfigError("end must not precede start")

    vocabulary = marker_vocabulary(priors.size)
    rng = np.random.default_rng(seed)
    ads, planted_buckets = [], []
    for i in range(n_ads):
        bucket = PLANTED_BUCKETS[int(rng.choice(3, p=mix))]
        n_persuasive = {"high": sentences_per_ad, "mid": sentences_per_ad // 2, "low": 0}[bucket]
        flags = [True] * n_persuasive + [False] * (sentences_per_ad - n_persuasive)
        flags = [flags[j] for j in rng.permutation(sentences_per_ad)]
        sentences = []
        for persuasive in flags:
            planted: list[int] = []
            if persuasive:
                planted = np.flatnonzero(rng.random(priors.size) < priors).tolist()
                if not planted:
                    planted = [int(rng.integers(priors.size))]
            sentences.append(_compose_sentence(rng, planted, vocabulary))

        start_date = start + timedelta(days=int(rng.integers(span)))
        end_date = min(start_date + timedelta(days=int(rng.integers(1, 15)) - 1), end)
        scale = 2 if bucket == "high" else 1
        spend_lo = 100 * int(rng.integers(0, 10)) * scale
        impressions_lo = 1000 * int(rng.integers(1, 40)) * scale
        fractions = rng.dirichlet(np.ones(len(SYNTHETIC_AGE_BUCKETS) * len(SYNTHETIC_GENDERS)))
        fractions[-1] = 1.0 - math.fsum(fractions[:-1])
        demographics = tuple(
            Demographic(age, gender, float(fractions[a * len(SYNTHETIC_GENDERS) + g]))
            for a, age in enumerate(SYNTHETIC_AGE_BUCKETS) for g, gender in enumerate(SYNTHETIC_GENDERS))
        ads.append(AdRecord(
            ad_id=f"ad-{i:06d}",
            text=" ".join(sentences),
            funder=SYNTHETIC_FUNDERS[int(rng.integers(len(SYNTHETIC_FUNDERS)))],
            created=start_date,
            start_date=start_date,
            end_date=end_date,
            spend_lo=float(spend_lo),
            spend_hi=float(spend_lo + 99),
            impressions_lo=impressions_lo,
            impressions_hi=impressions_lo + 999,
            demographics=demographics,
        ))
        planted_buckets.append(bucket)
    return SyntheticAdCorpus(tuple(ads), tuple(planted_buckets))
