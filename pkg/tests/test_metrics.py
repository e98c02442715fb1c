import itertools

import numpy as np
import pytest

from adpersuasion.errors import InputFormatError, ShapeMismatchError, UndefinedStatisticError
from adpersuasion.metrics import (agreement_table, binary_accuracy, binary_f1, confusion_counts, evaluation_report,
                                  f1_macro, f1_micro, fleiss_kappa)

# Fleiss (1971) style reference table: 10 items, 14 raters, 5 categories
KAPPA_TABLE = np.array([
    [0, 0, 0, 0, 14],
    [0, 2, 6, 4, 2],
    [0, 0, 3, 5, 6],
    [0, 3, 9, 2, 0],
    [2, 2, 8, 1, 1],
    [7, 7, 0, 0, 0],
    [3, 2, 6, 3, 0],
    [2, 5, 3, 2, 2],
    [6, 5, 2, 1, 0],
    [0, 2, 2, 3, 7],
])


class TestF1:
    def test_exhaustive_two_by_two(self):
        matrices = [np.array(bits).reshape(2, 2) for bits in itertools.product((0, 1), repeat=4)]
        for pred, gold in itertools.product(matrices, repeat=2):
            tp = int(((pred == 1) & (gold == 1)).sum())
            fp = int(((pred == 1) & (gold == 0)).sum())
            fn = int(((pred == 0) & (gold == 1)).sum())
            micro = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
            per_label = []
            for j in range(2):
                p, g = pred[:, j], gold[:, j]
                t = int(((p == 1) & (g == 1)).sum())
                d = 2 * t + int(((p == 1) & (g == 0)).sum()) + int(((p == 0) & (g == 1)).sum())
                per_label.append(2 * t / d if d else 0.0)
            assert f1_micro(pred, gold) == pytest.approx(micro)
            assert f1_macro(pred, gold) == pytest.approx(sum(per_label) / 2)

    def test_micro_pools_counts(self):
        pred = [[1, 0], [0, 1]]
        gold = [[1, 0], [1, 1]]
        assert f1_micro(pred, gold) == pytest.approx(0.8)

    def test_macro_averages_labels(self):
        pred = [[1, 0], [0, 1]]
        gold = [[1, 0], [1, 1]]
        assert f1_macro(pred, gold) == pytest.approx((2 / 3 + 1.0) / 2)

    def test_perfect_prediction(self, rng):
        gold = (rng.random((30, 4)) < 0.3).astype(int)
        gold[0] = 1
        assert f1_micro(gold, gold) == 1.0

    def test_all_zero_is_zero_not_nan(self):
        zeros = np.zeros((3, 2), dtype=int)
        assert f1_micro(zeros, zeros) == 0.0
        assert f1_macro(zeros, zeros) == 0.0

    def test_absent_label_convention(self):
        pred = [[1, 0], [0, 0]]
        gold = [[1, 0], [0, 0]]
        assert f1_macro(pred, gold, include_absent=True) == pytest.approx(0.5)
        assert f1_macro(pred, gold, include_absent=False) == pytest.approx(1.0)

    def test_counts_sum_to_instances(self, rng):
        pred = (rng.random((25, 3)) < 0.5).astype(int)
        gold = (rng.random((25, 3)) < 0.5).astype(int)
        counts = confusion_counts(pred, gold)
        np.testing.assert_array_equal(counts.tp + counts.fp + counts.fn + counts.tn, 25)

    def test_micro_within_macro_range_of_labels(self, rng):
        pred = (rng.random((40, 5)) < 0.4).astype(int)
        gold = (rng.random((40, 5)) < 0.4).astype(int)
        per_label = confusion_counts(pred, gold).per_label_f1()
        assert per_label.min() - 1e-12 <= f1_micro(pred, gold) <= per_label.max() + 1e-12

    def test_row_permutation_invariance(self, rng):
        for _ in range(50):
            n, k = (int(v) for v in rng.integers(1, 12, size=2))
            pred = (rng.random((n, k)) < 0.4).astype(int)
            gold = (rng.random((n, k)) < 0.4).astype(int)
            order = rng.permutation(n)
            assert f1_micro(pred[order], gold[order]) == pytest.approx(f1_micro(pred, gold), abs=1e-15)
            assert f1_macro(pred[order], gold[order]) == pytest.approx(f1_macro(pred, gold), abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            f1_micro([[1, 0]], [[1, 0, 0]])

    def test_non_binary_values(self):
        with pytest.raises(InputFormatError):
            f1_micro([[2]], [[1]])


class TestBinary:
    def test_accuracy(self):
        assert binary_accuracy([1, 0, 1, 1], [1, 0, 0, 1]) == 0.75

    def test_accuracy_symmetric(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 30))
            pred, gold = rng.integers(0, 2, size=n), rng.integers(0, 2, size=n)
            assert binary_accuracy(pred, gold) == binary_accuracy(gold, pred)

    def test_accuracy_empty(self):
        with pytest.raises(UndefinedStatisticError):
            binary_accuracy([], [])

    def test_f1_of_positive_class(self):
        assert binary_f1([1, 1, 0, 0], [1, 0, 1, 0]) == pytest.approx(0.5)

    def test_column_vector_accepted(self):
        assert binary_accuracy([[1], [0]], [[1], [1]]) == 0.5


class TestFleissKappa:
    def test_hand_example(self):
        assert fleiss_kappa([[4, 0], [0, 4], [2, 2]]) == pytest.approx(0.5556, abs=1e-4)

    def test_reference_table(self):
        assert fleiss_kappa(KAPPA_TABLE) == pytest.approx(0.210, abs=2e-3)

    def test_category_permutation_invariance(self, rng):
        expected = fleiss_kappa(KAPPA_TABLE)
        for _ in range(20):
            order = rng.permutation(KAPPA_TABLE.shape[1])
            assert fleiss_kappa(KAPPA_TABLE[:, order]) == pytest.approx(expected, abs=1e-12)

    def test_perfect_agreement(self):
        assert fleiss_kappa([[2, 0], [0, 2]]) == pytest.approx(1.0)

    def test_single_category_is_undefined(self):
        with pytest.raises(UndefinedStatisticError):
            fleiss_kappa([[3, 0], [3, 0]])

    def test_unequal_rater_counts(self):
        with pytest.raises(InputFormatError):
            fleiss_kappa([[2, 0], [1, 2]])

    def test_table_from_ratings(self):
        table = agreement_table([[0, 0, 1], [2, 2, 2]], n_categories=3)
        np.testing.assert_array_equal(table.counts, [[2, 1, 0], [0, 0, 3]])
        assert table.n_raters == 3


class TestEvaluationReport:
    def test_multilabel_report(self):
        report = evaluation_report([[1, 0], [0, 1]], [[1, 0], [1, 1]], ["a", "b"])
        data = report.to_dict()
        assert data["accuracy"] is None
        assert data["per_label"][0] == {"label": "a", "tp": 1, "fp": 0, "fn": 1, "f1": pytest.approx(2 / 3)}
        assert data["f1_micro"] == pytest.approx(0.8)

    def test_binary_report_has_accuracy(self):
        report = evaluation_report([[1], [0], [0]], [[1], [1], [0]], ["persuasive"], binary=True)
        assert report.accuracy == pytest.approx(2 / 3)

    def test_label_names_must_match_columns(self):
        with pytest.raises(ShapeMismatchError):
            evaluation_report([[1, 0]], [[1, 0]], ["only-one"])
