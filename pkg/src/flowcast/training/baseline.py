"""历史平均基线：每个预测步取训练区间内同一日内相位的均值。"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from flowcast.core import get_logger
from flowcast.core.errors import DataError
from flowcast.data.types import IndexRange, TrafficDataset

logger = get_logger(__name__)


def phase_means(dataset: TrafficDataset, train_range: IndexRange) -> NDArray[np.float64]:
    """q×N×F 的相位均值表（反归一化尺度），相位 = (t - 1) mod q。"""

    cube = dataset.cube[train_range.to_slice()] + dataset.stored_mean
    phases = (np.arange(train_range.start, train_range.stop + 1) - 1) % dataset.q
    table = np.empty((dataset.q, dataset.N, dataset.F), dtype=np.float64)
    for phase in range(dataset.q):
        rows = cube[phases == phase]
        if rows.shape[0] == 0:
            raise DataError(f"相位 {phase} 在训练区间 {train_range.to_list()} 内从未出现")
        table[phase] = rows.mean(axis=0)
    return table


def historical_average_baseline(
    dataset: TrafficDataset,
    anchors: Sequence[int],
    T_p: int,
    train_range: IndexRange,
    *,
    f_out: Optional[int] = None,
) -> NDArray[np.float64]:
    """返回 len(anchors)×N×f_out×T_p 的预测（反归一化尺度）。"""

    f_out = dataset.F if f_out is None else f_out
    table = phase_means(dataset, train_range)
    predictions = np.empty((len(anchors), dataset.N, f_out, T_p), dtype=np.float64)
    for row, t0 in enumerate(anchors):
        # 目标索引 t0+1 .. t0+T_p 对应 0-based 的 t0 .. t0+T_p-1
        phases = np.arange(t0, t0 + T_p) % dataset.q
        predictions[row] = np.transpose(table[phases][:, :, :f_out], (1, 2, 0))
    logger.debug("Historical average baseline for %d anchors", len(anchors))
    return predictions
