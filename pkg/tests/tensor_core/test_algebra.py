from __future__ import annotations

import numpy as np
import pytest

from flowcast.core import DataError, ShapeError
from flowcast.tensor_core import (
    as_tensor3,
    banded_m,
    facewise_product,
    fold3,
    frontal_slice,
    identity_m,
    m_product,
    m_transform,
    m_transform_inverse,
    unfold3,
)


def _slices(values: list[float]) -> np.ndarray:
    return np.array(values, dtype=np.float64).reshape(1, 1, -1)


def test_as_tensor3_validation() -> None:
    with pytest.raises(ShapeError):
        as_tensor3(np.zeros((2, 2)))
    with pytest.raises(ShapeError):
        as_tensor3(np.zeros((2, 0, 2)))
    with pytest.raises(DataError):
        as_tensor3(np.array([[[1.0, np.nan]]]))


def test_frontal_slice_is_one_based() -> None:
    A = np.arange(8.0).reshape(2, 2, 2)
    np.testing.assert_array_equal(frontal_slice(A, 1), A[:, :, 0])
    with pytest.raises(ShapeError):
        frontal_slice(A, 3)


def test_unfold_fold_inverse(rng: np.random.Generator) -> None:
    A = rng.normal(size=(3, 2, 5))
    assert unfold3(A).shape == (5, 6)
    np.testing.assert_array_equal(fold3(unfold3(A), 3, 2), A)


def test_m_transform_examples() -> None:
    A = _slices([1.0, 2.0, 3.0])
    np.testing.assert_allclose(m_transform(A, banded_m(3, 3)).ravel(), [1.0, 1.5, 2.0], atol=1e-15)

    B = np.arange(1.0, 9.0).reshape(2, 2, 2)
    out = m_transform(B, np.array([[1.0, 0.0], [0.5, 0.5]]))
    np.testing.assert_array_equal(out[:, :, 0], B[:, :, 0])
    np.testing.assert_allclose(out[:, :, 1], 0.5 * B[:, :, 0] + 0.5 * B[:, :, 1])


def test_m_transform_matches_unfold_oracle(rng: np.random.Generator) -> None:
    A = rng.normal(size=(2, 3, 6))
    M = banded_m(6, 3)
    oracle = fold3(M.entries @ unfold3(A), 2, 3)
    np.testing.assert_allclose(m_transform(A, M), oracle, rtol=0, atol=1e-12)


def test_m_transform_shape_error_names_both_shapes() -> None:
    with pytest.raises(ShapeError, match=r"\(1, 1, 3\).*\(4, 4\)"):
        m_transform(np.zeros((1, 1, 3)), banded_m(4, 2))


def test_m_transform_inverse_examples() -> None:
    B = _slices([1.0, 2.0, 3.0])
    M = banded_m(3, 2)
    np.testing.assert_allclose(m_transform_inverse(m_transform(B, M), M), B, atol=1e-12)
    A = np.arange(12.0).reshape(2, 2, 3)
    np.testing.assert_array_equal(m_transform_inverse(A, identity_m(3)), A)


def test_facewise_examples() -> None:
    eye = np.repeat(np.eye(2)[:, :, None], 2, axis=2)
    B = np.arange(1.0, 5.0).reshape(2, 1, 2)
    np.testing.assert_array_equal(facewise_product(eye, B), B)
    np.testing.assert_array_equal(facewise_product(np.zeros((2, 2, 2)), B), np.zeros((2, 1, 2)))

    A = np.zeros((2, 2, 2))
    A[:, :, 0] = [[1, 2], [3, 4]]
    A[:, :, 1] = [[0, 1], [1, 0]]
    C = np.zeros((2, 1, 2))
    C[:, 0, 0] = [1, 1]
    C[:, 0, 1] = [2, 5]
    out = facewise_product(A, C)
    np.testing.assert_array_equal(out[:, 0, 0], [3, 7])
    np.testing.assert_array_equal(out[:, 0, 1], [5, 2])


def test_facewise_shape_errors() -> None:
    with pytest.raises(ShapeError):
        facewise_product(np.zeros((2, 3, 2)), np.zeros((2, 1, 2)))
    with pytest.raises(ShapeError):
        facewise_product(np.zeros((2, 2, 2)), np.zeros((2, 1, 3)))


def test_m_product_examples(rng: np.random.Generator) -> None:
    A = rng.normal(size=(2, 2, 3))
    B = rng.normal(size=(2, 2, 3))
    np.testing.assert_allclose(
        m_product(A, B, identity_m(3)), facewise_product(A, B), rtol=0, atol=1e-12
    )
    eye = np.repeat(np.eye(2)[:, :, None], 3, axis=2)
    np.testing.assert_allclose(m_product(eye, B, banded_m(3, 2)), B, rtol=0, atol=1e-12)

    M = banded_m(3, 2)
    oracle = m_transform(facewise_product(m_transform(A, M), m_transform(B, M)), M.inverse)
    np.testing.assert_allclose(m_product(A, B, M), oracle, rtol=0, atol=1e-12)


def test_algebra_suite_randomized(rng: np.random.Generator) -> None:
    for _ in range(200):
        d1, d2, d3 = (int(v) for v in rng.integers(1, 7, size=3))
        T = int(rng.integers(1, 13))
        b = int(rng.integers(1, T + 1))
        M = banded_m(T, b)
        A = rng.normal(size=(d1, d2, T))
        B = rng.normal(size=(d2, d3, T))
        C = rng.normal(size=(d3, d1, T))

        np.testing.assert_allclose(m_transform_inverse(m_transform(A, M), M), A, rtol=0, atol=1e-10)
        I = identity_m(T)
        np.testing.assert_allclose(m_product(A, B, I), facewise_product(A, B), rtol=0, atol=1e-12)

        alpha, beta = rng.normal(size=2)
        A2 = rng.normal(size=A.shape)
        np.testing.assert_allclose(
            m_transform(alpha * A + beta * A2, M),
            alpha * m_transform(A, M) + beta * m_transform(A2, M),
            rtol=0,
            atol=1e-10,
        )
        left = m_product(m_product(A, B, M), C, M)
        right = m_product(A, m_product(B, C, M), M)
        np.testing.assert_allclose(left, right, rtol=0, atol=1e-8)


def test_causality_suite_randomized(rng: np.random.Generator) -> None:
    for _ in range(100):
        T = int(rng.integers(2, 13))
        b = int(rng.integers(1, T + 1))
        M = banded_m(T, b)
        A = rng.normal(size=(2, 2, T))
        base = m_transform(A, M)
        k = int(rng.integers(0, T))
        perturbed = A.copy()
        perturbed[:, :, k] += 1.0 + rng.random()
        out = m_transform(perturbed, M)
        for t in range(T):
            in_band = max(0, t - b + 1) <= k <= t
            if k > t:
                np.testing.assert_array_equal(out[:, :, t], base[:, :, t])
            elif in_band:
                assert np.any(out[:, :, t] != base[:, :, t])
            else:
                np.testing.assert_array_equal(out[:, :, t], base[:, :, t])
