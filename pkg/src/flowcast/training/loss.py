"""训练损失。"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike

from flowcast.autodiff import Node, Tape
from flowcast.core.errors import ContractError, ShapeError


def mse_loss(pred: ArrayLike, target: ArrayLike) -> float:
    """全部元素上 (pred - target)^2 的均值。"""

    pred_arr = np.asarray(pred, dtype=np.float64)
    target_arr = np.asarray(target, dtype=np.float64)
    if pred_arr.shape != target_arr.shape:
        raise ShapeError(f"mse_loss 维度不匹配: pred{pred_arr.shape} 与 target{target_arr.shape}")
    if pred_arr.size == 0:
        raise ContractError("mse_loss 输入为空")
    diff = pred_arr - target_arr
    return float(np.mean(diff * diff))


def batch_mse_node(tape: Tape, predictions: Sequence[Node], targets: Sequence[np.ndarray]) -> Node:
    """小批量损失 = 各样本 MSE 的平均；所有样本共享同一组参数叶子。"""

    if not predictions or len(predictions) != len(targets):
        raise ContractError(f"预测数 {len(predictions)} 与目标数 {len(targets)} 不一致或为空")
    total = tape.mse(predictions[0], targets[0])
    for pred, target in zip(predictions[1:], targets[1:]):
        total = tape.add(total, tape.mse(pred, target))
    if len(predictions) == 1:
        return total
    return tape.scale(total, 1.0 / len(predictions))
