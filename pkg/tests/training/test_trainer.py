from __future__ import annotations

import numpy as np
import pytest

from flowcast.core import EpochRecord, ForecastConfig, TrainingAborted
from flowcast.data import PreparedData
from flowcast.graph import adjacency_set
from flowcast.model import ModelParams
from flowcast.training import evaluate_mae, train
from flowcast.training import trainer as trainer_module


def test_zero_epochs_returns_input(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    params, report = train(quick_params, quick_data, quick_cfg.with_updates(epochs=0))
    assert params is quick_params
    assert report.epochs == []
    assert report.best_epoch is None


def test_zero_learning_rate_keeps_parameters(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    params, report = train(quick_params, quick_data, quick_cfg.with_updates(lr=0.0, epochs=2))
    assert params.max_abs_diff(quick_params) == 0.0
    assert report.val_losses[0] == report.val_losses[1]


def test_training_is_reproducible(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    first, report_a = train(quick_params, quick_data, quick_cfg)
    second, report_b = train(quick_params, quick_data, quick_cfg)
    assert report_a.train_losses == report_b.train_losses
    assert report_a.val_losses == report_b.val_losses
    assert first.max_abs_diff(second) == 0.0
    assert quick_params.max_abs_diff(first) > 0.0


def test_prefetch_does_not_change_results(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    _, threaded = train(quick_params, quick_data, quick_cfg.with_updates(epochs=2, prefetch=2))
    _, sync = train(quick_params, quick_data, quick_cfg.with_updates(epochs=2, prefetch=0))
    assert threaded.train_losses == sync.train_losses


def test_best_parameters_reproduce_best_validation(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    cfg = quick_cfg.with_updates(epochs=4)
    best, report = train(quick_params, quick_data, cfg)
    adjacency = adjacency_set(quick_data.topology, cfg.branch_lengths())
    val_mae = evaluate_mae(
        best, adjacency, quick_data.batches("val"), quick_data.dataset.stored_mean
    )
    assert abs(val_mae - min(report.val_losses)) <= 1e-9
    assert report.best_epoch == int(np.argmin(report.val_losses)) + 1
    assert report.initial_train_loss is not None and report.initial_train_loss > 0


def test_patience_stops_when_validation_stalls(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    cfg = quick_cfg.with_updates(lr=0.0, epochs=3, patience=1)
    _, report = train(quick_params, quick_data, cfg)
    assert report.stopped_early
    assert [rec.epoch for rec in report.epochs] == [1, 2]
    assert report.best_epoch == 1


def test_epoch_callback(
    quick_cfg: ForecastConfig, quick_data: PreparedData, quick_params: ModelParams
) -> None:
    seen: list[EpochRecord] = []
    _, report = train(quick_params, quick_data, quick_cfg.with_updates(epochs=2), on_epoch=seen.append)
    assert seen == report.epochs
    lines = report.to_jsonl(config_hash="h").splitlines()
    assert len(lines) == 2
    assert '"config_hash": "h"' in lines[0]


def test_non_finite_loss_aborts(
    monkeypatch: pytest.MonkeyPatch,
    quick_cfg: ForecastConfig,
    quick_data: PreparedData,
    quick_params: ModelParams,
) -> None:
    monkeypatch.setattr(trainer_module, "_step", lambda params, adjacency, group: (float("nan"), {}))
    with pytest.raises(TrainingAborted) as excinfo:
        train(quick_params, quick_data, quick_cfg)
    assert (excinfo.value.epoch, excinfo.value.batch) == (1, 1)


def test_divergence_aborts(
    monkeypatch: pytest.MonkeyPatch,
    quick_cfg: ForecastConfig,
    quick_data: PreparedData,
    quick_params: ModelParams,
) -> None:
    monkeypatch.setattr(trainer_module, "_step", lambda params, adjacency, group: (1e300, {}))
    with pytest.raises(TrainingAborted, match="超过初始损失"):
        train(quick_params, quick_data, quick_cfg)
