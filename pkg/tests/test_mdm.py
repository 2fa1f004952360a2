import numpy as np
import pytest

from htgnn.mdm import (
    BalanceError,
    InfeasibleMarketError,
    MdmConfig,
    brute_force_min_support,
    check_balance,
    infer_loan_matrix,
    loan_matrix_to_edges,
)


def feasible_instance(rng, n, scale=1.0, density=0.5):
    """Balanced totals admitting a self-loop-free loan matrix.

    Built from the row/column sums of a random off-diagonal matrix, so
    feasibility holds by construction for every n (including n=2, where
    generic balanced totals are infeasible).
    """
    z = rng.exponential(scale, (n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(z, 0.0)
    return z.sum(axis=1), z.sum(axis=0)


def assert_valid(z, a, l):
    n = len(a)
    assert np.all(np.diag(z) == 0.0)
    np.testing.assert_allclose(z.sum(axis=1), a, rtol=0, atol=1e-9 * max(1.0, a.max()))
    np.testing.assert_allclose(z.sum(axis=0), l, rtol=0, atol=1e-9 * max(1.0, l.max()))
    assert np.count_nonzero(z) <= 2 * n - 1


class TestCheckBalance:
    def test_already_balanced(self):
        out = check_balance(np.array([5.0, 0.0]), np.array([0.0, 5.0]))
        np.testing.assert_array_equal(out, [0.0, 5.0])

    def test_rescale_within_tolerance(self):
        out = check_balance(np.array([5.0, 0.0]), np.array([0.0, 5.000004]), tol=1e-6)
        assert out.sum() == pytest.approx(5.0, abs=1e-12)
        assert out[1] == pytest.approx(5.0, abs=1e-9)

    def test_imbalance_beyond_tolerance(self):
        with pytest.raises(BalanceError, match="5.*6"):
            check_balance(np.array([5.0, 0.0]), np.array([0.0, 6.0]), tol=1e-6)

    def test_zero_totals_pass_through(self):
        out = check_balance(np.zeros(3), np.zeros(3))
        np.testing.assert_array_equal(out, np.zeros(3))

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            check_balance(np.array([-1.0]), np.array([1.0]))


class TestInferLoanMatrix:
    def test_single_source_single_sink(self):
        z = infer_loan_matrix(np.array([5.0, 0.0]), np.array([0.0, 5.0]))
        np.testing.assert_array_equal(z, [[0.0, 5.0], [0.0, 0.0]])

    def test_forced_three_edge_solution(self):
        z = infer_loan_matrix(np.array([4.0, 2.0, 0.0]), np.array([0.0, 3.0, 3.0]))
        expected = np.zeros((3, 3))
        expected[0, 1] = 3.0
        expected[0, 2] = 1.0
        expected[1, 2] = 2.0
        np.testing.assert_array_equal(z, expected)

    def test_two_bank_swap(self):
        z = infer_loan_matrix(np.array([3.0, 3.0]), np.array([3.0, 3.0]))
        np.testing.assert_array_equal(z, [[0.0, 3.0], [3.0, 0.0]])

    def test_empty_market(self):
        z = infer_loan_matrix(np.zeros(4), np.zeros(4))
        np.testing.assert_array_equal(z, np.zeros((4, 4)))

    def test_single_bank_zero_ok(self):
        np.testing.assert_array_equal(infer_loan_matrix(np.array([0.0]), np.array([0.0])), [[0.0]])

    def test_single_bank_positive_rejected(self):
        with pytest.raises(InfeasibleMarketError):
            infer_loan_matrix(np.array([3.0]), np.array([3.0]))

    def test_infeasible_two_banks(self):
        # Bank 0 must both grant and receive everything: needs a self-loan.
        with pytest.raises(InfeasibleMarketError):
            infer_loan_matrix(np.array([2.0, 1.0]), np.array([2.0, 1.0]))

    def test_self_loop_trap_rerouted(self):
        a = np.array([5.0, 5.0, 2.0])
        z = infer_loan_matrix(a, a.copy())
        assert_valid(z, a, a)

    def test_random_instances_satisfy_invariants(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 51))
            a, l = feasible_instance(rng, n, scale=float(rng.uniform(0.5, 500)))
            z = infer_loan_matrix(a, l)
            assert_valid(z, a, l)

    def test_power_of_two_scaling_preserves_support(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            n = int(rng.integers(2, 20))
            a, l = feasible_instance(rng, n)
            z = infer_loan_matrix(a, l)
            for lam in (2.0, 0.5, 4.0):
                zs = infer_loan_matrix(lam * a, lam * l)
                np.testing.assert_array_equal(zs > 0, z > 0)
                np.testing.assert_allclose(zs, lam * z, rtol=1e-12)

    def test_unbalanced_rejected(self):
        with pytest.raises(BalanceError):
            infer_loan_matrix(np.array([1.0, 0.0]), np.array([0.0, 2.0]))


class TestBruteForce:
    def test_single_edge(self):
        size, z = brute_force_min_support(np.array([5.0, 0.0]), np.array([0.0, 5.0]))
        assert size == 1
        np.testing.assert_array_equal(z, [[0.0, 5.0], [0.0, 0.0]])

    def test_two_edges_needed(self):
        size, z = brute_force_min_support(np.array([3.0, 3.0]), np.array([3.0, 3.0]))
        assert size == 2
        assert np.count_nonzero(z) == 2

    def test_empty_market(self):
        size, z = brute_force_min_support(np.zeros(2), np.zeros(2))
        assert size == 0
        np.testing.assert_array_equal(z, np.zeros((2, 2)))

    def test_size_cap(self):
        with pytest.raises(ValueError, match="N <= 5"):
            brute_force_min_support(np.zeros(6), np.zeros(6))

    def test_oracle_vs_heuristic_on_small_instances(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            a, l = feasible_instance(rng, n)
            minimal, witness = brute_force_min_support(a, l)
            assert_valid_brute(witness, a, l)
            z = infer_loan_matrix(a, l)
            assert_valid(z, a, l)
            assert minimal <= np.count_nonzero(z)


def assert_valid_brute(z, a, l):
    assert np.all(np.diag(z) == 0.0)
    np.testing.assert_allclose(z.sum(axis=1), a, rtol=0, atol=1e-9 * max(1.0, a.max()))
    np.testing.assert_allclose(z.sum(axis=0), l, rtol=0, atol=1e-9 * max(1.0, l.max()))


class TestLoanMatrixToEdges:
    def test_single_entry(self):
        edges, weights = loan_matrix_to_edges(np.array([[0.0, 5.0], [0.0, 0.0]]))
        np.testing.assert_array_equal(edges, [[0, 1]])
        np.testing.assert_array_equal(weights, [5.0])

    def test_bidirectional_merged(self):
        edges, weights = loan_matrix_to_edges(np.array([[0.0, 3.0], [3.0, 0.0]]))
        np.testing.assert_array_equal(edges, [[0, 1]])
        np.testing.assert_array_equal(weights, [6.0])

    def test_zero_matrix(self):
        edges, weights = loan_matrix_to_edges(np.zeros((3, 3)))
        assert edges.shape == (0, 2)
        assert weights.shape == (0,)

    def test_transpose_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a, l = feasible_instance(rng, 8)
            z = infer_loan_matrix(a, l)
            e1, w1 = loan_matrix_to_edges(z)
            e2, w2 = loan_matrix_to_edges(z.T)
            np.testing.assert_array_equal(e1, e2)
            np.testing.assert_array_equal(w1, w2)


class TestMdmConfig:
    def test_positive_fields_enforced(self):
        with pytest.raises(ValueError):
            MdmConfig(balance_tolerance=0.0)
        with pytest.raises(ValueError):
            MdmConfig(fixed_cost_c=-1.0)
