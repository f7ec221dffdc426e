from __future__ import annotations

import math

import numpy as np
import pytest

from flowcast.core import ContractError, ForecastConfig, ShapeError
from flowcast.data import prepare_data
from flowcast.eval_cli import evaluate_model, horizon_reports, mae, rmse
from flowcast.eval_cli.metrics import denormalized_predictions
from flowcast.graph import adjacency_set
from flowcast.model import ModelSpec, init_params


def test_metric_examples() -> None:
    assert mae([3.0, 1.0], [1.0, 1.0]) == 1.0
    assert rmse([3.0, 1.0], [1.0, 1.0]) == pytest.approx(math.sqrt(2.0))
    assert mae([2.0, 2.0], [2.0, 2.0]) == 0.0
    with pytest.raises(ShapeError):
        mae([1.0, 2.0], [1.0])
    with pytest.raises(ContractError):
        rmse([], [])


def test_rmse_never_below_mae(rng: np.random.Generator) -> None:
    for _ in range(100):
        pred, obs = rng.normal(size=(2, int(rng.integers(1, 50))))
        assert rmse(pred, obs) >= mae(pred, obs) - 1e-12


def test_horizon_reports() -> None:
    predictions = np.zeros((2, 3, 1, 4))
    targets = np.zeros((2, 3, 1, 4))
    targets[..., 1] = 2.0
    reports = horizon_reports(predictions, targets, [1, 2, 4])
    assert [(r.horizon_steps, r.scope) for r in reports] == [
        (1, "step"),
        (2, "step"),
        (4, "step"),
        (4, "window"),
    ]
    assert reports[0].mae == 0.0
    assert reports[1].mae == 2.0
    assert reports[1].n == 6
    assert reports[-1].mae == pytest.approx(0.5)
    assert reports[-1].rmse == pytest.approx(1.0)
    with pytest.raises(ShapeError):
        horizon_reports(predictions, targets[..., :3], [1])


def test_predictions_are_denormalized(desk_cfg: ForecastConfig) -> None:
    data = prepare_data(desk_cfg)
    params = init_params(ModelSpec.from_config(desk_cfg, data.dataset.F), seed=0)
    adjacency = adjacency_set(data.topology, desk_cfg.branch_lengths())
    batches = data.batches("test")[:3]
    predictions, targets = denormalized_predictions(
        params, adjacency, batches, data.dataset.stored_mean
    )
    assert predictions.shape == targets.shape == (3, 4, 1, 4)
    raw = data.raw.cube
    np.testing.assert_allclose(targets[0, :, 0, :], raw[96:100, :, 0].T, rtol=0, atol=1e-9)
    # 原始尺度的流量在 60 附近，未加回均值的目标会在 0 附近
    assert targets.mean() > 20.0


def test_evaluate_model_report(desk_cfg: ForecastConfig) -> None:
    data = prepare_data(desk_cfg)
    params = init_params(ModelSpec.from_config(desk_cfg, data.dataset.F), seed=0)
    report = evaluate_model(params, data, desk_cfg, config_hash="abc")
    payload = report.to_dict()
    assert payload["anchors"] == list(range(96, 117))
    assert [r["horizon_steps"] for r in payload["model"]] == [1, 2, 3, 4, 4]
    assert payload["model"][-1]["scope"] == "window"
    assert payload["model"][-1]["n"] == 21 * 4 * 4
    assert report.baseline_window.mae > 0
    assert payload["config_hash"] == "abc"
