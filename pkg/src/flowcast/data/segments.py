"""多分段抽取：近期（hourly）、日周期（daily）、周周期（weekly）与预测目标。

所有索引为 1-based，与时间公式一致：
  hourly  = [t0 - T_h + 1, t0]
  daily   = d = T_d/T_p, ..., 1 的窗口 [t0 - q·d + 1, t0 - q·d + T_p] 依次拼接
  weekly  = 同上，步长改为 7q
  target  = [t0 + 1, t0 + T_p]
"""

from __future__ import annotations

from typing import Dict, Optional

import numpy as np
from numpy.typing import NDArray

from flowcast.core.errors import ConfigError, ContractError, RangeError

from .types import SegmentBatch, TrafficDataset

Indices = NDArray[np.int64]


def _check_lengths(q: int, T_p: int, T_h: int, T_d: int, T_w: int) -> None:
    if min(q, T_p, T_h, T_d, T_w) < 1:
        raise ConfigError(f"分段长度需为正整数: q={q}, T_p={T_p}, T_h={T_h}, T_d={T_d}, T_w={T_w}")
    if T_d % T_p or T_w % T_p:
        raise ConfigError(f"T_d={T_d} 与 T_w={T_w} 必须是 T_p={T_p} 的整数倍")
    if T_p > q:
        raise ConfigError(f"T_p={T_p} 超过 q={q}，日周期窗口会越过 t0")


def min_anchor(q: int, T_p: int, T_h: int, T_d: int, T_w: int) -> int:
    """满足全部历史窗口的最小 t0。"""

    _check_lengths(q, T_p, T_h, T_d, T_w)
    return max(T_h, q * (T_d // T_p), 7 * q * (T_w // T_p))


def _periodic(t0: int, stride: int, length: int, T_p: int) -> Indices:
    windows = [
        np.arange(t0 - stride * d + 1, t0 - stride * d + T_p + 1, dtype=np.int64)
        for d in range(length // T_p, 0, -1)
    ]
    return np.concatenate(windows)


def segment_indices(t0: int, q: int, T_p: int, T_h: int, T_d: int, T_w: int) -> Dict[str, Indices]:
    """返回各分段与目标窗口的 1-based 时间索引。"""

    lowest = min_anchor(q, T_p, T_h, T_d, T_w)
    if t0 < lowest:
        raise RangeError(f"t0={t0} 的历史不足", min_t0=lowest)
    return {
        "hourly": np.arange(t0 - T_h + 1, t0 + 1, dtype=np.int64),
        "daily": _periodic(t0, q, T_d, T_p),
        "weekly": _periodic(t0, 7 * q, T_w, T_p),
        "target": np.arange(t0 + 1, t0 + T_p + 1, dtype=np.int64),
    }


def _gather(cube: NDArray[np.float64], indices: Indices) -> NDArray[np.float64]:
    # T×N×F -> N×F×len
    return np.ascontiguousarray(np.transpose(cube[indices - 1], (1, 2, 0)))


def extract_segments(
    dataset: TrafficDataset,
    t0: int,
    T_p: int,
    T_h: int,
    T_d: int,
    T_w: int,
    *,
    f_out: Optional[int] = None,
) -> SegmentBatch:
    """按锚点 t0 切出三段输入与目标；输入从不读取 t0 之后的索引。"""

    indices = segment_indices(t0, dataset.q, T_p, T_h, T_d, T_w)
    if t0 + T_p > dataset.T_total:
        raise ContractError(
            f"目标窗口 [{t0 + 1}, {t0 + T_p}] 超出数据长度 {dataset.T_total}"
            f"（最大可用 t0 = {dataset.T_total - T_p}）"
        )
    f_out = dataset.F if f_out is None else f_out
    if not 1 <= f_out <= dataset.F:
        raise ContractError(f"f_out={f_out} 需位于 [1, {dataset.F}]")
    cube = dataset.cube
    return SegmentBatch(
        hourly=_gather(cube, indices["hourly"]),
        daily=_gather(cube, indices["daily"]),
        weekly=_gather(cube, indices["weekly"]),
        target=_gather(cube[:, :, :f_out], indices["target"]),
        t0=int(t0),
    )
