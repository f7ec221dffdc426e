"""训练循环：前向 -> backward -> 裁剪 -> 优化器更新，按验证 MAE 早停并恢复最优参数。"""

from __future__ import annotations

import math
import time
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from flowcast.autodiff import Tape, backward
from flowcast.core import EpochRecord, ForecastConfig, TrainReport, get_logger
from flowcast.core.errors import TrainingAborted
from flowcast.data import PreparedData, SegmentBatch
from flowcast.graph import AdjacencyTensor, adjacency_set
from flowcast.model import ModelParams, bind_adjacency, bind_params, forward_nodes, predict

from .loss import batch_mse_node, mse_loss
from .optim import build_optimizer, clip_global_norm
from .producer import BatchProducer
from .settings import TrainConfig

logger = get_logger(__name__)

DIVERGENCE_FACTOR = 1e6

EpochCallback = Callable[[EpochRecord], None]


def evaluate_mse(
    params: ModelParams,
    adjacency: Mapping[str, AdjacencyTensor],
    batches: Sequence[SegmentBatch],
) -> float:
    """归一化尺度上的平均样本 MSE。"""

    predictions = predict(params, adjacency, batches)
    return float(np.mean([mse_loss(p, b.target) for p, b in zip(predictions, batches)]))


def evaluate_mae(
    params: ModelParams,
    adjacency: Mapping[str, AdjacencyTensor],
    batches: Sequence[SegmentBatch],
    mean: np.ndarray,
    *,
    workers: int = 1,
) -> float:
    """反归一化尺度上的 MAE：预测与目标都加回训练均值后再比较。"""

    predictions = predict(params, adjacency, batches, workers=workers)
    offset = mean[: batches[0].target.shape[1]].reshape(1, -1, 1)
    errors = [np.abs((p + offset) - (b.target + offset)) for p, b in zip(predictions, batches)]
    return float(np.mean(np.concatenate([e.ravel() for e in errors])))


def _step(
    params: ModelParams,
    adjacency: Mapping[str, AdjacencyTensor],
    group: List[SegmentBatch],
) -> tuple[float, Dict[str, np.ndarray]]:
    tape = Tape()
    nodes = bind_params(tape, params, trainable=True)
    adjacency_nodes = bind_adjacency(tape, adjacency, params.spec)
    predictions = [forward_nodes(tape, b, adjacency_nodes, nodes, params.spec) for b in group]
    loss = batch_mse_node(tape, predictions, [b.target for b in group])
    value = float(loss.value)
    if not math.isfinite(value):
        return value, {}
    return value, backward(tape, loss)


def train(
    params: ModelParams,
    data: PreparedData,
    cfg: ForecastConfig,
    *,
    on_epoch: Optional[EpochCallback] = None,
) -> tuple[ModelParams, TrainReport]:
    """小批量训练；相同配置与种子下损失序列完全可复现。

    epochs=0 时直接返回原参数与空报告。
    """

    settings = TrainConfig.from_config(cfg)
    if settings.epochs == 0:
        logger.info("epochs=0, skipping training")
        return params, TrainReport()

    started = time.perf_counter()
    adjacency = adjacency_set(data.topology, cfg.branch_lengths())
    mean = data.dataset.stored_mean
    train_batches = data.batches("train")
    val_batches = data.batches("val")
    producer = BatchProducer(
        data.plan.anchor_list("train"),
        data.batch,
        batch_size=settings.batch_size,
        seed=settings.seed,
        prefetch=settings.prefetch,
    )
    optimizer = build_optimizer(settings)

    current = params.copy()
    initial_loss = evaluate_mse(current, adjacency, train_batches)
    report = TrainReport(initial_train_loss=initial_loss)
    best = current.copy()
    best_val = math.inf
    best_epoch = 0
    logger.info(
        "Starting training. epochs=%d, batch_size=%d, optimizer=%s, lr=%g, initial_loss=%.6f",
        settings.epochs,
        settings.batch_size,
        settings.optimizer,
        settings.lr,
        initial_loss,
    )

    for epoch in range(1, settings.epochs + 1):
        losses: List[float] = []
        for index, group in enumerate(producer.epoch(epoch), start=1):
            loss, grads = _step(current, adjacency, group)
            if not math.isfinite(loss):
                raise TrainingAborted(f"损失为 {loss}", epoch=epoch, batch=index)
            if initial_loss > 0 and loss > DIVERGENCE_FACTOR * initial_loss:
                raise TrainingAborted(
                    f"损失 {loss:.6g} 超过初始损失 {initial_loss:.6g} 的 {DIVERGENCE_FACTOR:g} 倍",
                    epoch=epoch,
                    batch=index,
                )
            if settings.grad_clip is not None:
                grads, _ = clip_global_norm(grads, settings.grad_clip)
            optimizer.step(current.values, grads)
            losses.append(loss)

        val_mae = evaluate_mae(current, adjacency, val_batches, mean)
        record = EpochRecord(epoch=epoch, train_loss=float(np.mean(losses)), val_loss=val_mae)
        report.epochs.append(record)
        if on_epoch is not None:
            on_epoch(record)
        logger.info(
            "Epoch %d/%d train_loss=%.6f val_mae=%.6f", epoch, settings.epochs, record.train_loss, val_mae
        )

        if val_mae < best_val:
            best_val = val_mae
            best_epoch = epoch
            best = current.copy()
        elif settings.patience is not None and epoch - best_epoch >= settings.patience:
            report.stopped_early = True
            logger.info("Early stopping at epoch %d (best epoch %d)", epoch, best_epoch)
            break

    report.wall_time_s = time.perf_counter() - started
    logger.info(
        "Training finished. best_epoch=%s, best_val_mae=%.6f, wall_time=%.2fs",
        report.best_epoch,
        best_val,
        report.wall_time_s,
    )
    return best, report
