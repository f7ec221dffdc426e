from __future__ import annotations

import numpy as np
import pytest

from flowcast.core import ContractError, ShapeError
from flowcast.model import AffParams, aff_fuse, attention_map


def _aff_params(rng: np.random.Generator, features: int = 6, r: int = 2) -> AffParams:
    mid = -(-features // r)
    return AffParams(
        global_down=rng.normal(size=(features, mid, 1)),
        global_up=rng.normal(size=(mid, features, 1)),
        local_down=rng.normal(size=(features, mid, 1)),
        local_up=rng.normal(size=(mid, features, 1)),
        r=r,
    )


def test_forced_weights(rng: np.random.Generator) -> None:
    params = _aff_params(rng)
    X1, X2 = rng.normal(size=(2, 3, 6, 4))
    np.testing.assert_array_equal(aff_fuse(X1, X2, params, forced_weight=1.0), X1)
    np.testing.assert_array_equal(aff_fuse(X1, X2, params, forced_weight=0.0), X2)
    np.testing.assert_allclose(
        aff_fuse(X1, X2, params, forced_weight=0.5), 0.5 * (X1 + X2), rtol=0, atol=1e-15
    )
    with pytest.raises(ContractError):
        aff_fuse(X1, X2, params, forced_weight=1.5)


def test_equal_inputs_pass_through(rng: np.random.Generator) -> None:
    X = rng.normal(size=(3, 6, 4))
    np.testing.assert_allclose(aff_fuse(X, X.copy(), _aff_params(rng)), X, rtol=0, atol=1e-12)


def test_output_is_convex_combination(rng: np.random.Generator) -> None:
    for _ in range(20):
        params = _aff_params(rng)
        X1, X2 = rng.normal(scale=3.0, size=(2, 4, 6, 3))
        Y = aff_fuse(X1, X2, params)
        assert np.all(Y >= np.minimum(X1, X2) - 1e-12)
        assert np.all(Y <= np.maximum(X1, X2) + 1e-12)


def test_attention_map_is_strictly_inside_unit_interval(rng: np.random.Generator) -> None:
    params = _aff_params(rng)
    X1, X2 = rng.normal(size=(2, 3, 6, 4))
    H = attention_map(X1, X2, params)
    assert H.shape == X1.shape
    assert np.all((H > 0.0) & (H < 1.0))


def test_global_context_is_shared_across_positions(rng: np.random.Generator) -> None:
    params = _aff_params(rng)
    params = AffParams(
        global_down=params.global_down,
        global_up=params.global_up,
        local_down=np.zeros_like(params.local_down),
        local_up=np.zeros_like(params.local_up),
        r=params.r,
    )
    X1, X2 = rng.normal(size=(2, 3, 6, 4))
    H = attention_map(X1, X2, params)
    np.testing.assert_allclose(H, np.broadcast_to(H[:1, :, :1], H.shape), rtol=0, atol=1e-15)


def test_shape_mismatch(rng: np.random.Generator) -> None:
    params = _aff_params(rng)
    with pytest.raises(ShapeError):
        aff_fuse(np.ones((3, 6, 4)), np.ones((3, 6, 2)), params)
    with pytest.raises(ShapeError):
        aff_fuse(np.ones((3, 5, 4)), np.ones((3, 5, 4)), params)
