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
Text normalization, tokenization, order-insensitive n-grams and TF-IDF vectorization.

Normalization applies its enabled transforms in a fixed order:
links, emoji, punctuation, lowercase, whitespace collapse.

  * links: maximal runs matching URL_PATTERN (scheme or www. prefix up to the next whitespace)
  * emoji: code points in EMOJI_PATTERN (emoticons, pictographs, dingbats, flags,
    variation selector 16, zero width joiner, tag characters)
  * punctuation: Unicode categories P* plus ASCII symbols, deleted, or padded
    with spaces when split_punctuation keeps them as tokens

TF-IDF uses tf = count(t, d) / |d| and the smoothed idf = ln((1 + N) / (1 + df)) + 1,
the idf of scikit-learn's TfidfTransformer(smooth_idf=True).
"""

from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, ClassVar, Iterable, Optional, Sequence
import hashlib
import json
import re
import string
import unicodedata

import numpy as np
from scipy import sparse
from sklearn.feature_extraction.text import CountVectorizer, TfidfTransformer

from adpersuasion.errors import ConfigError, InputFormatError

URL_PATTERN = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
EMOJI_PATTERN = re.compile(
    "["
    "\U0001F000-\U0001FAFF"
    "\U00002300-\U000023FF"
    "\U00002600-\U000027BF"
    "\U00002B00-\U00002BFF"
    "\U0000FE0F"
    "\U0000200D"
    "\U000E0020-\U000E007F"
    "]+")
_WHITESPACE = re.compile(r"\s+")


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    """The shipped English stopword list."""
    text = resources.files("adpersuasion").joinpath("resources", "stopwords_en.txt").read_text("utf-8")
    return _parse_word_list(text)


def _parse_word_list(text: str) -> frozenset[str]:
    return frozenset(line.strip().lower() for line in text.splitlines()
                     if line.strip() and not line.startswith("#"))


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Reads a stopword file, one token per line, '#' starts a comment line."""
    return _parse_word_list(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class PrepConfig:
    """
    Text preprocessing switches.
    """
    lowercase: bool = True
    strip_punctuation: bool = True
    strip_emoji_links: bool = True
    remove_stopwords: bool = False
    stopword_list: frozenset[str] = field(default_factory=default_stopwords)
    split_punctuation: bool = False
    """Pad kept punctuation with spaces so each mark becomes a token."""
    stem: bool = False
    """Apply the rule-based suffix stripper."""

    @classmethod
    def for_analysis(cls) -> "PrepConfig":
        """Lexical analysis of ads: every strip on, stopwords removed."""
        return cls(remove_stopwords=True)

    @classmethod
    def for_classifier(cls) -> "PrepConfig":
        """Classification keeps punctuation as separate tokens."""
        return cls(strip_punctuation=False, split_punctuation=True)

    def to_dict(self) -> dict[str, Any]:
        stopwords: Any = "default" if self.stopword_list == default_stopwords() else sorted(self.stopword_list)
        return {
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "strip_emoji_links": self.strip_emoji_links,
            "remove_stopwords": self.remove_stopwords,
            "stopwords": stopwords,
            "split_punctuation": self.split_punctuation,
            "stem": self.stem,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PrepConfig":
        data = dict(data)
        stopwords = data.pop("stopwords", "default")
        stopword_file = data.pop("stopword_file", None)
        known = {"lowercase", "strip_punctuation", "strip_emoji_links", "remove_stopwords", "split_punctuation", "stem"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown prep option(s): {', '.join(sorted(unknown))}")
        if stopword_file is not None:
            stopword_list = load_stopwords(stopword_file)
        elif stopwords == "default":
            stopword_list = default_stopwords()
        else:
            stopword_list = frozenset(str(w).lower() for w in stopwords)
        return cls(stopword_list=stopword_list, **{k: bool(v) for k, v in data.items()})


@lru_cache(maxsize=4096)
def _is_punctuation(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch).startswith("P")


def normalize(text: str, cfg: PrepConfig) -> str:
    """
    Applies the enabled transforms: links, emoji, punctuation, lowercase, whitespace collapse.
    :param text: raw text.
    :param cfg: preprocessing switches.
    :return: normalized text, idempotent for a fixed config.
    """
    if cfg.strip_emoji_links:
        text = URL_PATTERN.sub(" ", text)
        text = EMOJI_PATTERN.sub(" ", text)
    if cfg.strip_punctuation:
        text = "".join(ch for ch in text if not _is_punctuation(ch))
    elif cfg.split_punctuation:
        text = "".join(f" {ch} " if _is_punctuation(ch) else ch for ch in text)
    if cfg.lowercase:
        text = text.lower()
    return _WHITESPACE.sub(" ", text).strip()


def tokenize(text: str) -> list[str]:
    return text.split()


_STEM_EXCEPTIONS = frozenset({
    "news", "bus", "gas", "this", "his", "is", "was", "has", "does", "yes", "us", "thus", "plus",
    "always", "perhaps", "series", "species", "during", "thing", "king", "bring", "sing", "nothing",
    "something", "everything", "morning", "evening", "red", "bed", "need", "feed", "seed", "speed",
})
_VOWELS = frozenset("aeiouy")


def _undouble(stem: str) -> str:
    if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz" and stem[-1] not in _VOWELS:
        return stem[:-1]
    return stem


def stem(token: str) -> str:
    """
    Rule-based English suffix stripper: plural -s/-es, -ing, -ed.
    Tokens of three letters or fewer and exception words pass unchanged.
    """
    if len(token) <= 3 or token in _STEM_EXCEPTIONS:
        return token
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if token.endswith(("ss", "us", "is")):
        return token
    if token.endswith("es") and token[:-2].endswith(("sh", "ch", "x", "z")):
        return token[:-2]
    if token.endswith("s"):
        return token[:-1]
    for suffix in ("ing", "ed"):
        base = token[:-len(suffix)]
        if token.endswith(suffix) and len(base) >= 3 and any(ch in _VOWELS for ch in base):
            return _undouble(base)
    return token


def preprocess(text: str, cfg: PrepConfig) -> list[str]:
    """
    normalize, tokenize, drop stopwords, stem; each step as enabled in cfg.
    """
    tokens = tokenize(normalize(text, cfg))
    if cfg.remove_stopwords:
        tokens = [t for t in tokens if t.lower() not in cfg.stopword_list]
    if cfg.stem:
        tokens = [stem(t) for t in tokens]
    return tokens


def canonical_ngrams(tokens: Sequence[str], n: int) -> Counter:
    """
    Counts adjacent n-grams, each sorted lexicographically first,
    so ('w1', 'w2') and ('w2', 'w1') are the same n-gram.
    """
    if n < 2:
        raise ConfigError(f"n-gram order must be at least 2, got {n}")
    return Counter(tuple(sorted(tokens[i:i + n])) for i in range(len(tokens) - n + 1))


def canonical_bigrams(tokens: Sequence[str]) -> Counter:
    return canonical_ngrams(tokens, 2)


def top_ngrams(docs: Iterable[Sequence[str]], n: int, k: int) -> list[tuple[tuple[str, ...], int]]:
    """
    Most frequent canonical n-grams over a corpus, ties broken lexicographically.
    """
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    total: Counter = Counter()
    for doc in docs:
        total.update(canonical_ngrams(doc, n))
    return sorted(total.items(), key=lambda item: (-item[1], item[0]))[:k]


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """
    Lexicographically indexed terms with their document frequencies.
    """
    terms: tuple[str, ...]
    df: np.ndarray
    n_docs: int

    def __post_init__(self):
        object.__setattr__(self, "df", np.asarray(self.df, dtype=np.int64))
        if self.n_docs < 1:
            raise ConfigError("vocabulary needs at least one document")
        if self.df.shape != (len(self.terms),):
            raise ConfigError("df must have one entry per term")
        if len(self.terms) and (self.df.min() < 1 or self.df.max() > self.n_docs):
            raise ConfigError("document frequencies must lie in [1, n_docs]")
        object.__setattr__(self, "_index", {term: i for i, term in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def index(self, term: str) -> Optional[int]:
        return self._index.get(term)

    @property
    def mapping(self) -> dict[str, int]:
        """Term to column index, the fixed vocabulary handed to CountVectorizer."""
        return dict(self._index)

    @cached_property
    def transformer(self) -> Optional[TfidfTransformer]:
        """
        Smoothed-idf transformer fitted on an indicator matrix with this vocabulary's document frequencies,
        None for an empty vocabulary.
        """
        if not len(self.terms):
            return None
        rows = np.concatenate([np.arange(count) for count in self.df])
        cols = np.repeat(np.arange(len(self.terms)), self.df)
        indicator = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(self.n_docs, len(self.terms)))
        return TfidfTransformer(norm=None, use_idf=True, smooth_idf=True).fit(indicator)

    def idf(self) -> np.ndarray:
        if self.transformer is None:
            return np.empty(0)
        return np.asarray(self.transformer.idf_, dtype=np.float64)

    def to_dict(self) -> dict[str, Any]:
        return {"terms": list(self.terms), "df": self.df.tolist(), "n_docs": self.n_docs}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Vocabulary":
        return cls(tuple(data["terms"]), np.asarray(data["df"], dtype=np.int64), int(data["n_docs"]))

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _as_tokens(doc: Sequence[str]) -> list[str]:
    return list(doc)


def build_vocabulary(docs: Sequence[Sequence[str]], min_df: int = 1) -> Vocabulary:
    """
    Keeps every term whose document frequency reaches min_df.
    :param docs: token lists.
    :param min_df: minimum document frequency, at least 1.
    :return: Vocabulary indexed in lexicographic term order.
    """
    if not docs:
        raise ConfigError("cannot build a vocabulary from zero documents")
    if min_df < 1:
        raise ConfigError(f"min_df must be at least 1, got {min_df}")
    vectorizer = CountVectorizer(analyzer=_as_tokens, lowercase=False, binary=True, min_df=min_df)
    try:
        presence = vectorizer.fit_transform(docs)
    except ValueError:
        # no token at all, or none left after min_df pruning
        return Vocabulary((), np.empty(0, np.int64), len(docs))
    terms = tuple(str(term) for term in vectorizer.get_feature_names_out())
    df = np.asarray(presence.sum(axis=0)).ravel().astype(np.int64)
    return Vocabulary(terms, df, len(docs))


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """
    Sparse (index, weight) pairs, indices strictly increasing, no explicit zeros.
    """
    indices: np.ndarray
    weights: np.ndarray
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        if self.indices.shape != self.weights.shape:
            raise ConfigError("indices and weights differ in length")
        if self.indices.size:
            if np.any(np.diff(self.indices) <= 0) or self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ConfigError("indices must be strictly increasing within [0, dim)")
            if not np.all(np.isfinite(self.weights)) or np.any(self.weights == 0):
                raise ConfigError("weights must be finite and non-zero")

    def __len__(self) -> int:
        return int(self.indices.size)

    def get(self, index: int) -> float:
        position = np.searchsorted(self.indices, index)
        if position < self.indices.size and self.indices[position] == index:
            return float(self.weights[position])
        return 0.0

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        dense[self.indices] = self.weights
        return dense


def tfidf(doc: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    """
    TF-IDF weights of one document; out-of-vocabulary tokens count towards |d| only.
    An empty document gives the zero vector.
    """
    row = tfidf_matrix([doc], vocab)
    return FeatureVector(row.indices, row.data, len(vocab))


def tfidf_matrix(docs: Sequence[Sequence[str]], vocab: Vocabulary) -> sparse.csr_matrix:
    """
    Row-stacked tfidf vectors: raw counts from CountVectorizer over the fixed vocabulary,
    idf scaling from the vocabulary's TfidfTransformer, then division by document length.
    """
    if not docs or vocab.transformer is None:
        return sparse.csr_matrix((len(docs), len(vocab)), dtype=np.float64)
    counts = CountVectorizer(analyzer=_as_tokens, lowercase=False, vocabulary=vocab.mapping).transform(docs)
    weighted = sparse.csr_matrix(vocab.transformer.transform(counts), dtype=np.float64)
    lengths = np.array([len(doc) for doc in docs], dtype=np.float64)
    scale = np.divide(1.0, lengths, out=np.zeros_like(lengths), where=lengths > 0)
    matrix = sparse.csr_matrix(sparse.diags(scale) @ weighted)
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


def average_tfidf(docs: Sequence[Sequence[str]], vocab: Vocabulary, k: int) -> list[tuple[str, float]]:
    """
    Mean tfidf weight of every term over all documents (zero where absent),
    sorted descending with ties broken lexicographically.
    :return: top k (term, score) pairs; terms absent everywhere are excluded.
    """
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    if not docs or not len(vocab):
        return []
    means = np.asarray(tfidf_matrix(docs, vocab).sum(axis=0)).ravel() / len(docs)
    ranked = sorted(((vocab.terms[i], float(means[i])) for i in np.flatnonzero(means > 0)),
                    key=lambda item: (-item[1], item[0]))
    return ranked[:k]


class Featurizer(ABC):
    """
    Turns sentence texts into a sparse feature matrix.
    The model only depends on this interface, so another backbone can replace the tf-idf one.
    """
    kind: ClassVar[str]

    @abstractmethod
    def fit(self, texts: Sequence[str]) -> "Featurizer":
        """Learns the feature space from training texts."""

    @abstractmethod
    def transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        """Rows are texts, columns the `dim` features."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Number of features."""

    @abstractmethod
    def digest(self) -> str:
        """Hash identifying the fitted feature space."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Serializable state including `kind`."""

    def fit_transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        return self.fit(texts).transform(texts)


class TfidfFeaturizer(Featurizer):
    """
    TF-IDF over preprocessed tokens, optionally extended with canonical bigram terms.
    """
    kind = "tfidf"

    def __init__(self, prep: Optional[PrepConfig] = None, min_df: int = 1, use_bigrams: bool = False,
                 l2_normalize: bool = True, vocabulary: Optional[Vocabulary] = None):
        """
        :param prep: preprocessing, PrepConfig.for_classifier() when omitted.
        :param min_df: minimum document frequency of a feature.
        :param use_bigrams: add canonical bigrams ("a b") as extra terms.
        :param l2_normalize: scale every row to unit length.
        :param vocabulary: fitted vocabulary, when restoring a saved featurizer.
        """
        self.prep = prep if prep is not None else PrepConfig.for_classifier()
        self.min_df = min_df
        self.use_bigrams = use_bigrams
        self.l2_normalize = l2_normalize
        self.vocabulary = vocabulary

    def terms(self, text: str) -> list[str]:
        tokens = preprocess(text, self.prep)
        if self.use_bigrams:
            tokens = tokens + [" ".join(pair) for pair in
                               (tuple(sorted(tokens[i:i + 2])) for i in range(len(tokens) - 1))]
        return tokens

    def fit(self, texts: Sequence[str]) -> "TfidfFeaturizer":
        self.vocabulary = build_vocabulary([self.terms(t) for t in texts], self.min_df)
        return self

    def transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        if self.vocabulary is None:
            raise ConfigError("featurizer is not fitted")
        matrix = tfidf_matrix([self.terms(t) for t in texts], self.vocabulary)
        if self.l2_normalize:
            norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
            scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
            matrix = sparse.csr_matrix(sparse.diags(scale) @ matrix)
        return matrix

    @property
    def dim(self) -> int:
        return len(self.vocabulary) if self.vocabulary is not None else 0

    def digest(self) -> str:
        state = self.to_dict()
        payload = json.dumps(state, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "prep": self.prep.to_dict(),
            "min_df": self.min_df,
            "use_bigrams": self.use_bigrams,
            "l2_normalize": self.l2_normalize,
            "vocabulary": self.vocabulary.to_dict() if self.vocabulary is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TfidfFeaturizer":
        vocabulary = data.get("vocabulary")
        return cls(prep=PrepConfig.from_dict(data["prep"]), min_df=int(data["min_df"]),
                   use_bigrams=bool(data["use_bigrams"]), l2_normalize=bool(data["l2_normalize"]),
                   vocabulary=Vocabulary.from_dict(vocabulary) if vocabulary is not None else None)


FEATURIZERS: dict[str, type] = {TfidfFeaturizer.kind: TfidfFeaturizer}


def featurizer_from_dict(data: dict[str, Any]) -> Featurizer:
    kind = data.get("kind")
    if kind not in FEATURIZERS:
        raise InputFormatError(f"unknown featurizer kind {kind!r}")
    return FEATURIZERS[kind].from_dict(data)
