"""三阶稠密张量载体与校验工具。

约定：数学公式使用 1-based 下标（与论文式一致），实现统一映射为 0-based：
公式中的第 t 个正面切片（frontal slice）对应 ``tensor[:, :, t - 1]``。
"""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from flowcast.core.errors import DataError, ShapeError

DenseTensor3 = NDArray[np.float64]
"""形状为 (d1, d2, d3) 的 float64 数组，行主序存储。"""


def as_tensor3(values: ArrayLike, *, check_finite: bool = True, copy: bool = False) -> DenseTensor3:
    """把外部数据转成 DenseTensor3；维度必须为 3 且各维为正。"""

    array = np.array(values, dtype=np.float64, copy=copy) if copy else np.asarray(values, dtype=np.float64)
    if array.ndim != 3:
        raise ShapeError(f"需要三阶张量，实际 ndim={array.ndim}, shape={array.shape}")
    if min(array.shape) < 1:
        raise ShapeError(f"张量各维需为正整数，实际 shape={array.shape}")
    if check_finite and not np.all(np.isfinite(array)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(array))[0])
        raise DataError(f"张量含 NaN/Inf，首个位置 {bad}")
    return array


def frontal_slice(tensor: DenseTensor3, t: int) -> NDArray[np.float64]:
    """返回第 t 个正面切片（1-based）。"""

    if not 1 <= t <= tensor.shape[2]:
        raise ShapeError(f"切片下标 t={t} 超出 [1, {tensor.shape[2]}]")
    return tensor[:, :, t - 1]


def unfold3(tensor: DenseTensor3) -> NDArray[np.float64]:
    """mode-3 展开：(d1, d2, T) -> (T, d1*d2)。"""

    d1, d2, d3 = tensor.shape
    return tensor.reshape(d1 * d2, d3).T


def fold3(matrix: NDArray[np.float64], d1: int, d2: int) -> DenseTensor3:
    """unfold3 的逆：(T, d1*d2) -> (d1, d2, T)。"""

    return np.ascontiguousarray(matrix.T).reshape(d1, d2, matrix.shape[0])


def describe(value: Any) -> str:
    """错误消息里用到的简短形状描述。"""

    shape = getattr(value, "shape", None)
    return f"{tuple(shape)}" if shape is not None else type(value).__name__
