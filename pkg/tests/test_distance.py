import numpy as np
import pytest

from htgnn.distance import cosine_distance_matrix, validate_distance_matrix


def test_orthogonal_vectors():
    d = cosine_distance_matrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_array_equal(d, [[0.0, 1.0], [1.0, 0.0]])


def test_scale_invariance():
    d = cosine_distance_matrix(np.array([[1.0, 1.0], [2.0, 2.0]]))
    assert d[0, 1] == pytest.approx(0.0, abs=1e-15)


def test_forty_five_degrees():
    d = cosine_distance_matrix(np.array([[1.0, 1.0], [1.0, 0.0]]))
    assert d[0, 1] == pytest.approx(1.0 - np.sqrt(2) / 2, abs=1e-12)
    assert d[0, 1] == pytest.approx(0.292893, abs=1e-6)


def test_zero_row_rejected():
    with pytest.raises(ValueError, match="bank index 1"):
        cosine_distance_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_opposite_vectors_hit_two():
    d = cosine_distance_matrix(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert d[0, 1] == 2.0


def test_nonnegative_features_stay_below_one():
    rng = np.random.default_rng(0)
    x = rng.random((40, 9))
    d = cosine_distance_matrix(x)
    assert d.min() >= 0.0 and d.max() <= 1.0


def test_output_contract_on_random_input():
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = rng.normal(size=(25, 6))
        d = cosine_distance_matrix(x)
        validate_distance_matrix(d)  # symmetric, finite, zero diagonal
        assert d.max() <= 2.0


def test_validator_rejects_asymmetry():
    bad = np.array([[0.0, 1.0], [0.9, 0.0]])
    with pytest.raises(ValueError, match="symmetric"):
        validate_distance_matrix(bad)


def test_validator_rejects_nonzero_diagonal():
    bad = np.array([[0.1, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError, match="diagonal"):
        validate_distance_matrix(bad)
