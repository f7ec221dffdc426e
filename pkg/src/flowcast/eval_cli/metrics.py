"""评估指标：MAE / RMSE，以及按预测步与整窗口汇总的测试集报告。"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from flowcast.core import ForecastConfig, MetricReport, get_logger
from flowcast.core.errors import ContractError, ShapeError
from flowcast.data import PreparedData, SegmentBatch
from flowcast.graph import AdjacencyTensor, adjacency_set
from flowcast.model import ModelParams, predict
from flowcast.training import historical_average_baseline

logger = get_logger(__name__)


def _flat_pair(pred: ArrayLike, obs: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    pred_arr = np.ravel(np.asarray(pred, dtype=np.float64))
    obs_arr = np.ravel(np.asarray(obs, dtype=np.float64))
    if pred_arr.size != obs_arr.size:
        raise ShapeError(f"预测长度 {pred_arr.size} 与观测长度 {obs_arr.size} 不一致")
    if pred_arr.size == 0:
        raise ContractError("指标输入为空")
    return pred_arr, obs_arr


def mae(pred: ArrayLike, obs: ArrayLike) -> float:
    """(1/n)·Σ|ŷ − y|"""

    pred_arr, obs_arr = _flat_pair(pred, obs)
    return float(np.mean(np.abs(pred_arr - obs_arr)))


def rmse(pred: ArrayLike, obs: ArrayLike) -> float:
    """sqrt((1/n)·Σ(ŷ − y)²)"""

    pred_arr, obs_arr = _flat_pair(pred, obs)
    diff = pred_arr - obs_arr
    return math.sqrt(float(np.mean(diff * diff)))


def metric_report(pred: ArrayLike, obs: ArrayLike, *, horizon_steps: int, scope: str = "step") -> MetricReport:
    pred_arr, obs_arr = _flat_pair(pred, obs)
    return MetricReport(
        horizon_steps=horizon_steps,
        mae=mae(pred_arr, obs_arr),
        rmse=rmse(pred_arr, obs_arr),
        n=int(pred_arr.size),
        scope=scope,
    )


def horizon_reports(
    predictions: NDArray[np.float64], targets: NDArray[np.float64], horizons: Sequence[int]
) -> List[MetricReport]:
    """predictions/targets 为 B×N×F×T_p；返回各预测步报告，最后附加整窗口报告。"""

    if predictions.shape != targets.shape:
        raise ShapeError(f"预测 {predictions.shape} 与目标 {targets.shape} 维度不一致")
    T_p = predictions.shape[-1]
    reports = [
        metric_report(predictions[..., h - 1], targets[..., h - 1], horizon_steps=h) for h in horizons
    ]
    reports.append(metric_report(predictions, targets, horizon_steps=T_p, scope="window"))
    return reports


@dataclass(slots=True)
class EvaluationReport:
    """测试集评估结果：模型与历史平均基线各一组报告（反归一化尺度）。"""

    model: List[MetricReport]
    baseline: List[MetricReport]
    config_hash: str = ""
    anchors: List[int] = field(default_factory=list)

    @property
    def window(self) -> MetricReport:
        return self.model[-1]

    @property
    def baseline_window(self) -> MetricReport:
        return self.baseline[-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": [report.to_dict() for report in self.model],
            "baseline": [report.to_dict() for report in self.baseline],
            "anchors": self.anchors,
            "config_hash": self.config_hash,
        }


def denormalized_predictions(
    params: ModelParams,
    adjacency: Mapping[str, AdjacencyTensor],
    batches: Sequence[SegmentBatch],
    mean: NDArray[np.float64],
    *,
    workers: int = 1,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """返回 (预测, 目标)，均为 B×N×f_out×T_p 且已加回训练均值。"""

    outputs = predict(params, adjacency, batches, workers=workers)
    f_out = batches[0].target.shape[1]
    offset = mean[:f_out].reshape(1, 1, -1, 1)
    predictions = np.stack(outputs) + offset
    targets = np.stack([batch.target for batch in batches]) + offset
    return predictions, targets


def evaluate_model(
    params: ModelParams,
    data: PreparedData,
    cfg: ForecastConfig,
    *,
    partition: str = "test",
    workers: Optional[int] = None,
    config_hash: str = "",
) -> EvaluationReport:
    """在指定区间（默认测试集）上计算模型与历史平均基线的各步与整窗口指标。"""

    anchors = data.plan.anchor_list(partition)
    batches = data.batches(partition)
    adjacency = adjacency_set(data.topology, cfg.branch_lengths())
    predictions, targets = denormalized_predictions(
        params, adjacency, batches, data.dataset.stored_mean, workers=workers or cfg.workers
    )
    baseline = historical_average_baseline(
        data.dataset, anchors, cfg.T_p, data.plan.train, f_out=cfg.f_out
    )
    horizons = cfg.horizon_steps()
    report = EvaluationReport(
        model=horizon_reports(predictions, targets, horizons),
        baseline=horizon_reports(baseline, targets, horizons),
        config_hash=config_hash,
        anchors=anchors,
    )
    logger.info(
        "Evaluated %s: window MAE=%.4f RMSE=%.4f (baseline MAE=%.4f)",
        partition,
        report.window.mae,
        report.window.rmse,
        report.baseline_window.mae,
    )
    return report
