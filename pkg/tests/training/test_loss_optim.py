from __future__ import annotations

import numpy as np
import pytest

from flowcast.autodiff import Tape, backward
from flowcast.core import ConfigError, ContractError, NumericalError, ShapeError
from flowcast.training import (
    SGD,
    Adam,
    TrainConfig,
    batch_mse_node,
    build_optimizer,
    clip_global_norm,
    global_norm,
    mse_loss,
)


def test_mse_examples() -> None:
    assert mse_loss([3.0], [1.0]) == 4.0
    assert mse_loss([[1.0, 2.0], [3.0, 4.0]], [[1.0, 0.0], [3.0, 6.0]]) == 2.0
    with pytest.raises(ShapeError):
        mse_loss([1.0, 2.0], [1.0])
    with pytest.raises(ContractError):
        mse_loss([], [])


def test_batch_loss_averages_samples() -> None:
    tape = Tape()
    first = tape.parameter(np.array([[[3.0]]]), name="a")
    second = tape.parameter(np.array([[[0.0]]]), name="b")
    loss = batch_mse_node(tape, [first, second], [np.array([[[1.0]]]), np.array([[[2.0]]])])
    assert float(loss.value) == pytest.approx(4.0)
    grads = backward(tape, loss)
    np.testing.assert_allclose(grads["a"], [[[2.0]]])
    np.testing.assert_allclose(grads["b"], [[[-2.0]]])
    with pytest.raises(ContractError):
        batch_mse_node(Tape(), [], [])


def test_sgd_step() -> None:
    params = {"w": np.array([1.0, 2.0])}
    SGD(0.1).step(params, {"w": np.array([0.5, -1.0])})
    np.testing.assert_allclose(params["w"], [0.95, 2.1], rtol=0, atol=1e-15)


def test_adam_first_step_moves_by_lr() -> None:
    params = {"w": np.zeros(2)}
    optimizer = Adam(0.1)
    optimizer.step(params, {"w": np.array([2.0, -3.0])})
    np.testing.assert_allclose(params["w"], [-0.1, 0.1], rtol=1e-6)
    assert optimizer.t == 1


@pytest.mark.parametrize("optimizer", [SGD(0.0), Adam(0.0)])
def test_zero_learning_rate_is_a_no_op(optimizer) -> None:
    params = {"w": np.array([1.0, -2.0])}
    for _ in range(3):
        optimizer.step(params, {"w": np.array([5.0, 5.0])})
    np.testing.assert_array_equal(params["w"], [1.0, -2.0])


def test_clip_returns_new_dict() -> None:
    grads = {"a": np.array([3.0]), "b": np.array([4.0])}
    clipped, norm = clip_global_norm(grads, 1.0)
    assert norm == 5.0
    np.testing.assert_allclose(clipped["a"], [0.6])
    np.testing.assert_allclose(clipped["b"], [0.8])
    np.testing.assert_array_equal(grads["a"], [3.0])
    assert global_norm(clipped) == pytest.approx(1.0)

    small, _ = clip_global_norm(grads, 10.0)
    np.testing.assert_array_equal(small["b"], [4.0])
    assert small["b"] is not grads["b"]


def test_clip_errors() -> None:
    with pytest.raises(ConfigError):
        clip_global_norm({"a": np.ones(1)}, 0.0)
    with pytest.raises(NumericalError):
        clip_global_norm({"a": np.array([np.inf])}, 1.0)


def test_train_config_and_factory(desk_cfg) -> None:
    settings = TrainConfig.from_config(desk_cfg)
    assert settings.lr == 0.01
    assert settings.batch_size == 4
    assert settings.to_dict()["optimizer"] == "adam"
    assert isinstance(build_optimizer(settings), Adam)
    sgd = TrainConfig(lr=0.1, epochs=1, batch_size=1, seed=0, optimizer="sgd")
    assert isinstance(build_optimizer(sgd), SGD)
    with pytest.raises(ConfigError):
        TrainConfig(lr=-1.0, epochs=1, batch_size=1, seed=0)
    with pytest.raises(ConfigError):
        TrainConfig(lr=0.1, epochs=2, batch_size=1, seed=0, patience=3)
