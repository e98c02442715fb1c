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
Evaluation metrics: micro and macro F1 over multi-label predictions, accuracy and F1 for the
binary task, Fleiss' kappa for inter-annotator agreement.

An F1 whose denominator 2TP + FP + FN is zero is defined as 0, and the macro mean runs over
every schema label unless include_absent=False restricts it to labels with gold positives.
"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from adpersuasion.errors import InputFormatError, ShapeMismatchError, UndefinedStatisticError


def _as_binary_matrix(values: Any, name: str) -> np.ndarray:
    matrix = np.asarray(values)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    if matrix.ndim != 2:
        raise ShapeMismatchError(f"{name} must be a 2-D 0/1 matrix, got {matrix.ndim} dimensions")
    if matrix.size and not np.isin(matrix, (0, 1)).all():
        raise InputFormatError(f"{name} must contain only 0 and 1")
    return matrix.astype(np.int64)


def _pair(pred: Any, gold: Any) -> tuple[np.ndarray, np.ndarray]:
    pred = _as_binary_matrix(pred, "pred")
    gold = _as_binary_matrix(gold, "gold")
    if pred.shape != gold.shape:
        raise ShapeMismatchError(f"pred shape {pred.shape} differs from gold shape {gold.shape}")
    return pred, gold


def _f1(tp: np.ndarray, fp: np.ndarray, fn: np.ndarray) -> np.ndarray:
    denominator = 2 * tp + fp + fn
    return np.divide(2.0 * tp, denominator, out=np.zeros(np.shape(denominator)), where=denominator > 0)


@dataclass(frozen=True, eq=False)
class ConfusionCounts:
    """
    Per-label TP, FP, FN, TN. For every label the four counts sum to n_instances.
    """
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray
    n_instances: int

    @property
    def n_labels(self) -> int:
        return int(self.tp.size)

    def per_label_f1(self) -> np.ndarray:
        return _f1(self.tp, self.fp, self.fn)

    def micro_f1(self) -> float:
        return float(_f1(np.array(self.tp.sum()), np.array(self.fp.sum()), np.array(self.fn.sum())))


def confusion_counts(pred: Any, gold: Any) -> ConfusionCounts:
    """
    :param pred: 0/1 matrix, rows instances, columns labels.
    :param gold: 0/1 matrix of the same shape.
    :return: ConfusionCounts
    """
    pred, gold = _pair(pred, gold)
    tp = (pred & gold).sum(axis=0)
    fp = (pred & (1 - gold)).sum(axis=0)
    fn = ((1 - pred) & gold).sum(axis=0)
    tn = ((1 - pred) & (1 - gold)).sum(axis=0)
    return ConfusionCounts(tp, fp, fn, tn, pred.shape[0])


def f1_micro(pred: Any, gold: Any) -> float:
    """
    F1 over TP, FP and FN pooled across all labels.
    """
    return confusion_counts(pred, gold).micro_f1()


def f1_macro(pred: Any, gold: Any, include_absent: bool = True) -> float:
    """
    Unweighted mean of per-label F1.
    :param include_absent: average over all labels (default) or only labels with gold positives.
    """
    counts = confusion_counts(pred, gold)
    scores = counts.per_label_f1()
    if not include_absent:
        scores = scores[(counts.tp + counts.fn) > 0]
    if not scores.size:
        return 0.0
    return float(scores.mean())


def _as_binary_vector(values: Any, name: str) -> np.ndarray:
    vector = np.asarray(values)
    if vector.ndim == 2 and vector.shape[1] == 1:
        vector = vector[:, 0]
    if vector.ndim != 1:
        raise ShapeMismatchError(f"{name} must be a 0/1 vector")
    if vector.size and not np.isin(vector, (0, 1)).all():
        raise InputFormatError(f"{name} must contain only 0 and 1")
    return vector.astype(np.int64)


def binary_accuracy(pred: Any, gold: Any) -> float:
    """Fraction of matching entries."""
    pred = _as_binary_vector(pred, "pred")
    gold = _as_binary_vector(gold, "gold")
    if pred.size != gold.size:
        raise ShapeMismatchError(f"pred has {pred.size} entries, gold has {gold.size}")
    if not pred.size:
        raise UndefinedStatisticError("accuracy of an empty prediction set is undefined")
    return float((pred == gold).mean())


def binary_f1(pred: Any, gold: Any) -> float:
    """F1 of the positive (persuasive) class."""
    pred = _as_binary_vector(pred, "pred")
    gold = _as_binary_vector(gold, "gold")
    if pred.size != gold.size:
        raise ShapeMismatchError(f"pred has {pred.size} entries, gold has {gold.size}")
    return f1_micro(pred[:, None], gold[:, None])


@dataclass(frozen=True, eq=False)
class AgreementTable:
    """
    counts[i, j]: raters assigning item i to category j. Every row sums to n_raters >= 2.
    """
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 1:
            raise ShapeMismatchError("agreement table must be a non-empty items x categories matrix")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(np.isfinite(counts)) or not np.all(counts == np.round(counts)):
                raise InputFormatError("agreement counts must be integers")
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise InputFormatError("agreement counts must be non-negative")
        sums = counts.sum(axis=1)
        if np.any(sums != sums[0]):
            raise InputFormatError("every item must be rated by the same number of raters")
        if sums[0] < 2:
            raise InputFormatError("at least two raters per item are required")
        object.__setattr__(self, "counts", counts)

    @property
    def n_raters(self) -> int:
        return int(self.counts[0].sum())


def agreement_table(ratings: Any, n_categories: Optional[int] = None) -> AgreementTable:
    """
    Builds an agreement table from category ids.
    :param ratings: items x raters matrix of category ids.
    :param n_categories: number of categories, max id + 1 when omitted.
    """
    ratings = np.asarray(ratings, dtype=np.int64)
    if ratings.ndim != 2:
        raise ShapeMismatchError("ratings must be an items x raters matrix")
    if n_categories is None:
        n_categories = int(ratings.max()) + 1 if ratings.size else 1
    if ratings.size and (ratings.min() < 0 or ratings.max() >= n_categories):
        raise InputFormatError(f"category ids must lie in [0, {n_categories})")
    counts = np.zeros((ratings.shape[0], n_categories), dtype=np.int64)
    for item, row in enumerate(ratings):
        counts[item] = np.bincount(row, minlength=n_categories)
    return AgreementTable(counts)


def fleiss_kappa(table: AgreementTable | Any) -> float:
    """
    Computes Fleiss' kappa.

                 P̄ - P̄e
        kappa = ---------
                 1 - P̄e

    P̄ is the mean per-item agreement, P̄e the agreement expected from category proportions.
    :raises UndefinedStatisticError: all ratings fall into one category (P̄e = 1).
    """
    if not isinstance(table, AgreementTable):
        table = AgreementTable(np.asarray(table))
    counts = table.counts.astype(np.float64)
    n = table.n_raters
    per_item = ((counts ** 2).sum(axis=1) - n) / (n * (n - 1))
    observed = per_item.mean()
    proportions = counts.sum(axis=0) / (counts.shape[0] * n)
    expected = float(np.dot(proportions, proportions))
    if np.isclose(expected, 1.0, rtol=0.0, atol=1e-12):
        raise UndefinedStatisticError("Fleiss' kappa is undefined when every rating falls into one category")
    return float((observed - expected) / (1.0 - expected))


@dataclass(frozen=True)
class LabelScore:
    label: str
    tp: int
    fp: int
    fn: int
    f1: float


@dataclass(frozen=True)
class EvaluationReport:
    f1_micro: float
    f1_macro: float
    per_label: tuple[LabelScore, ...]
    accuracy: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "f1_micro": self.f1_micro,
            "f1_macro": self.f1_macro,
            "per_label": [{"label": s.label, "tp": s.tp, "fp": s.fp, "fn": s.fn, "f1": s.f1}
                          for s in self.per_label],
            "accuracy": self.accuracy,
        }


def evaluation_report(pred: Any, gold: Any, label_names: Sequence[str], binary: bool = False,
                      include_absent: bool = True) -> EvaluationReport:
    """
    :param pred: predicted 0/1 matrix.
    :param gold: gold 0/1 matrix.
    :param label_names: one name per column.
    :param binary: single-column persuasive/neutral task, adds accuracy.
    :param include_absent: macro convention, see f1_macro.
    """
    counts = confusion_counts(pred, gold)
    if counts.n_labels != len(label_names):
        raise ShapeMismatchError(f"{counts.n_labels} label columns but {len(label_names)} label names")
    per_label = counts.per_label_f1()
    scores = tuple(LabelScore(name, int(counts.tp[j]), int(counts.fp[j]), int(counts.fn[j]), float(per_label[j]))
                   for j, name in enumerate(label_names))
    accuracy = binary_accuracy(np.asarray(pred).reshape(-1), np.asarray(gold).reshape(-1)) if binary else None
    return EvaluationReport(counts.micro_f1(), f1_macro(pred, gold, include_absent), scores, accuracy)
