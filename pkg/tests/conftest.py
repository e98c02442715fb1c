from datetime import date

import numpy as np
import pytest

from adpersuasion.corpus import (AdRecord, BinaryLabel, LabeledSentence, LabelSchema, binarize,
                                 generate_synthetic, stratified_split)
from adpersuasion.features import TfidfFeaturizer
from adpersuasion.model import LossConfig, Target, label_matrix, train

N_LABELS = 5
LABEL_PRIORS = [0.15] * N_LABELS


@pytest.fixture(scope="session")
def schema() -> LabelSchema:
    return LabelSchema.synthetic(N_LABELS)


@pytest.fixture(scope="session")
def synthetic_corpus() -> list[LabeledSentence]:
    return [binarize(s) for s in generate_synthetic(400, 5, LABEL_PRIORS, seed=7)]


@pytest.fixture(scope="session")
def synthetic_split(synthetic_corpus):
    return stratified_split(synthetic_corpus, 0.25, seed=0)


@pytest.fixture(scope="session")
def technique_model(synthetic_split, schema):
    Y = label_matrix(synthetic_split.train, schema, Target.MULTILABEL)
    return train(synthetic_split.train, TfidfFeaturizer(), schema, LossConfig.balanced(Y),
                 lr=10.0, epochs=1500, seed=0)


def make_sentences(n_neutral: int, n_persuasive: int) -> list[LabeledSentence]:
    sentences = [LabeledSentence(f"n{i // 10}", i % 10, f"neutral sentence {i}", binary=BinaryLabel.NEUTRAL)
                 for i in range(n_neutral)]
    sentences += [LabeledSentence(f"p{i // 10}", i % 10, f"persuasive sentence {i}", frozenset({0}),
                                  BinaryLabel.PERSUASIVE) for i in range(n_persuasive)]
    return sentences


def make_ad(ad_id: str = "ad-1", text: str = "Vote for change.", funder: str = "Fund A",
            start: date = date(2022, 5, 1), end: date = date(2022, 5, 1),
            spend: tuple[float, float] = (100, 199), impressions: tuple[int, int] = (1000, 1999),
            demographics=()) -> AdRecord:
    return AdRecord(ad_id, text, funder, start, start, end, float(spend[0]), float(spend[1]),
                    impressions[0], impressions[1], demographics)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
