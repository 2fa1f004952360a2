import math

import numpy as np
import pytest
import scipy.special
import scipy.stats

from htgnn.metrics import (
    ZeroVarianceError,
    classification_metrics,
    confusion_matrix,
    homophily_ratio,
    paired_t_test,
    regularized_incomplete_beta,
    student_t_sf,
)


class TestHomophily:
    def test_half_matching(self):
        assert homophily_ratio(np.array([[0, 1], [1, 2]]), np.array([1, 1, 2])) == 0.5

    def test_all_equal_labels(self):
        edges = np.array([[0, 1], [1, 2], [0, 2]])
        assert homophily_ratio(edges, np.array([3, 3, 3])) == 1.0

    def test_complete_bipartite_between_classes(self):
        edges = np.array([(i, j) for i in range(3) for j in range(3, 6)])
        labels = np.array([1, 1, 1, 2, 2, 2])
        assert homophily_ratio(edges, labels) == 0.0

    def test_empty_edges_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            homophily_ratio(np.empty((0, 2), np.int64), np.array([1]))

    def test_label_value_bijection_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            labels = rng.integers(1, 5, 12)
            edges = np.array([(i, j) for i in range(12) for j in range(i + 1, 12) if rng.random() < 0.4])
            if edges.size == 0:
                continue
            perm = rng.permutation([1, 2, 3, 4])
            relabeled = perm[labels - 1]
            assert homophily_ratio(edges, labels) == homophily_ratio(edges, relabeled)


class TestClassificationMetrics:
    def test_perfect_prediction(self):
        y = np.array([1, 2, 3, 4, 2])
        out = classification_metrics(y, y)
        assert out == {
            "accuracy": 1.0,
            "macro_precision": 1.0,
            "macro_recall": 1.0,
            "macro_f1": 1.0,
        }

    def test_hand_computed_example(self):
        out = classification_metrics(np.array([1, 1, 2, 2]), np.array([1, 2, 2, 2]))
        assert out["accuracy"] == 0.75
        # class 1: p=1, r=1/2, f1=2/3; class 2: p=2/3, r=1, f1=4/5; 3,4 absent.
        assert out["macro_f1"] == pytest.approx((2 / 3 + 0.8) / 2, abs=1e-9)
        assert out["macro_precision"] == pytest.approx((1.0 + 2 / 3) / 2, abs=1e-9)
        assert out["macro_recall"] == pytest.approx(0.75, abs=1e-9)

    def test_total_miss(self):
        out = classification_metrics(np.array([1, 2]), np.array([2, 1]))
        assert out["accuracy"] == 0.0
        assert out["macro_f1"] == 0.0

    def test_micro_recall_equals_accuracy(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            y = rng.integers(1, 5, n)
            yhat = rng.integers(1, 5, n)
            cm = confusion_matrix(y, yhat)
            micro_recall = np.trace(cm) / cm.sum()
            assert micro_recall == classification_metrics(y, yhat)["accuracy"]

    def test_all_metrics_in_unit_interval(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            y = rng.integers(1, 5, 15)
            yhat = rng.integers(1, 5, 15)
            out = classification_metrics(y, yhat)
            for value in out.values():
                assert 0.0 <= value <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            classification_metrics(np.array([1]), np.array([1, 2]))


class TestStudentTSf:
    def test_center_is_half(self):
        for dof in (1, 2, 5, 30):
            assert student_t_sf(0.0, dof) == 0.5

    def test_cauchy_quartile(self):
        # dof=1 is Cauchy: P(T > 1) = 1/2 - arctan(1)/pi = 1/4.
        assert student_t_sf(1.0, 1) == pytest.approx(0.25, abs=1e-12)
        assert student_t_sf(1.0, 1) == pytest.approx(0.5 - math.atan(1.0) / math.pi, abs=1e-12)

    def test_symmetry_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            t = float(rng.normal() * 3)
            dof = int(rng.integers(1, 50))
            assert abs(student_t_sf(t, dof) + student_t_sf(-t, dof) - 1.0) <= 1e-10

    def test_strictly_decreasing(self):
        grid = np.linspace(-6, 6, 121)
        for dof in (1, 4, 17):
            values = [student_t_sf(float(t), dof) for t in grid]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_normal_limit(self):
        assert abs(student_t_sf(1.96, 200) - 0.025) < 0.003

    def test_against_reference_library(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            t = float(rng.normal() * 4)
            dof = int(rng.integers(1, 120))
            assert student_t_sf(t, dof) == pytest.approx(
                scipy.stats.t.sf(t, dof), abs=1e-10
            )

    def test_incomplete_beta_against_reference(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = float(rng.uniform(0.2, 20))
            b = float(rng.uniform(0.2, 20))
            x = float(rng.random())
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                scipy.special.betainc(a, b, x), abs=1e-10
            )


class TestPairedTTest:
    def test_antisymmetric_differences_give_zero_t(self):
        result = paired_t_test(np.array([1.0, 2.0, 3.0]), np.array([3.0, 2.0, 1.0]))
        assert result.t_statistic == 0.0
        assert result.p_value == 1.0
        assert result.dof == 2

    def test_reference_fixture(self):
        a = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        b = np.array([2.0, 2.0, 4.0, 4.0, 7.0])
        result = paired_t_test(a, b)
        oracle = scipy.stats.ttest_rel(a, b)
        assert result.dof == 4
        assert result.t_statistic == pytest.approx(-2.1381, abs=1e-4)
        assert result.t_statistic == pytest.approx(oracle.statistic, abs=1e-10)
        assert result.p_value == pytest.approx(0.0993, abs=1e-4)
        assert result.p_value == pytest.approx(oracle.pvalue, abs=1e-10)

    def test_sign_antisymmetry_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert paired_t_test(a, b).t_statistic == -paired_t_test(b, a).t_statistic

    def test_shift_invariance(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=8)
        b = rng.normal(size=8)
        base = paired_t_test(a, b)
        shifted = paired_t_test(a + 13.5, b + 13.5)
        assert shifted.t_statistic == pytest.approx(base.t_statistic, rel=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(10)
        a = rng.normal(size=8)
        b = rng.normal(size=8)
        base = paired_t_test(a, b)
        scaled = paired_t_test(a * 4.0, b * 4.0)
        assert scaled.t_statistic == pytest.approx(base.t_statistic, rel=1e-12)

    def test_zero_variance_rejected(self):
        with pytest.raises(ZeroVarianceError):
            paired_t_test(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
        with pytest.raises(ZeroVarianceError):
            paired_t_test(np.array([2.0, 3.0]), np.array([1.0, 2.0]))

    def test_too_short(self):
        with pytest.raises(ValueError, match="at least 2"):
            paired_t_test(np.array([1.0]), np.array([2.0]))
