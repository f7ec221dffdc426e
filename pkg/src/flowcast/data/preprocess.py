"""预处理：缺失值线性插值与零均值变换（只减均值，不做方差缩放）。"""

from __future__ import annotations

from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from flowcast.core import get_logger
from flowcast.core.errors import DataError, ShapeError

from .types import IndexRange, TrafficDataset

logger = get_logger(__name__)

Array = NDArray[np.float64]


def interpolate_missing(cube: ArrayLike, mask: ArrayLike) -> Array:
    """沿时间逐 (节点, 特征) 线性插值；首尾缺口用最近观测值延拓。

    观测值原样保留（逐位一致）；mask 为 True 的位置视为缺失。
    """

    values = np.array(cube, dtype=np.float64, copy=True)
    missing = np.asarray(mask, dtype=bool)
    if values.ndim != 3 or missing.shape != values.shape:
        raise ShapeError(f"cube{values.shape} 与 mask{missing.shape} 需为相同的 T×N×F")
    if not missing.any():
        return values

    steps = np.arange(values.shape[0], dtype=np.float64)
    filled = 0
    for node in range(values.shape[1]):
        for feature in range(values.shape[2]):
            gaps = missing[:, node, feature]
            if not gaps.any():
                continue
            observed = ~gaps
            if not observed.any():
                raise DataError(f"节点 {node} 特征 {feature} 的序列全部缺失，无法插值")
            series = values[:, node, feature]
            series[gaps] = np.interp(steps[gaps], steps[observed], series[observed])
            filled += int(gaps.sum())
    logger.info("Interpolated %d missing entries", filled)
    return values


def zero_mean_normalize(cube: ArrayLike, train_range: IndexRange) -> Tuple[Array, Array]:
    """按特征减去训练区间的均值，返回 (变换后的 cube, mean)。"""

    values = np.asarray(cube, dtype=np.float64)
    if train_range.stop > values.shape[0]:
        raise DataError(f"训练区间 {train_range.to_list()} 超出数据长度 {values.shape[0]}")
    window = values[train_range.to_slice()]
    if window.shape[0] == 0:
        raise DataError("训练区间为空，无法计算均值")
    mean = window.mean(axis=(0, 1))
    return values - mean, mean


def denormalize(values: ArrayLike, mean: ArrayLike, *, feature_axis: int = 1) -> Array:
    """加回训练均值；默认输入为 N×F×T 布局，feature_axis 指明特征所在的轴。"""

    array = np.asarray(values, dtype=np.float64)
    mean_arr = np.asarray(mean, dtype=np.float64)
    shape = [1] * array.ndim
    shape[feature_axis] = array.shape[feature_axis]
    return array + mean_arr[: array.shape[feature_axis]].reshape(shape)


def preprocess_dataset(dataset: TrafficDataset, train_range: IndexRange) -> TrafficDataset:
    """插值（若有 mask）后做零均值变换，返回新的数据集对象。"""

    if dataset.mean is not None:
        raise DataError("数据集已经做过零均值变换")
    cube = dataset.cube
    if dataset.mask is not None:
        cube = interpolate_missing(cube, dataset.mask)
    if not np.all(np.isfinite(cube)):
        raise DataError("数据中存在未标记的 NaN/Inf，请提供缺失值 mask")
    normalized, mean = zero_mean_normalize(cube, train_range)
    logger.info("Normalized dataset with train range %s, mean=%s", train_range.to_list(), mean.tolist())
    return TrafficDataset(cube=normalized, q=dataset.q, mean=mean, mask=None, meta=dict(dataset.meta))
