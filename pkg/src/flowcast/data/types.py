"""数据模块的核心结构：观测立方体、分段批次与 1-based 闭区间。"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional

import numpy as np
from numpy.typing import NDArray

from flowcast.core.errors import ContractError, DataError, ShapeError


@dataclass(frozen=True, slots=True)
class IndexRange:
    """1-based 闭区间 [start, stop]，与时间索引公式保持一致。"""

    start: int
    stop: int

    def __post_init__(self) -> None:
        if self.start < 1 or self.stop < self.start:
            raise ContractError(f"非法区间 [{self.start}, {self.stop}]")

    def __len__(self) -> int:
        return self.stop - self.start + 1

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.start, self.stop + 1))

    def __contains__(self, index: object) -> bool:
        return isinstance(index, (int, np.integer)) and self.start <= int(index) <= self.stop

    def to_slice(self) -> slice:
        """转换为 0-based 的 Python 切片。"""

        return slice(self.start - 1, self.stop)

    def to_list(self) -> list[int]:
        return [self.start, self.stop]


@dataclass(slots=True)
class TrafficDataset:
    """时间主序观测立方体 T_total×N×F，以及反归一化所需的训练均值。

    mean 为 None 表示尚未做零均值变换；mask 中 True 表示该位置缺失。
    """

    cube: NDArray[np.float64]
    q: int
    mean: Optional[NDArray[np.float64]] = None
    mask: Optional[NDArray[np.bool_]] = None
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.cube = np.asarray(self.cube, dtype=np.float64)
        if self.cube.ndim != 3 or min(self.cube.shape) < 1:
            raise ShapeError(f"观测立方体需为 T_total×N×F，实际 shape={self.cube.shape}")
        if self.q < 1:
            raise DataError(f"每日采样数 q 需 >= 1，实际 {self.q}")
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.cube.shape:
                raise ShapeError(f"mask shape={self.mask.shape} 与 cube shape={self.cube.shape} 不一致")
        if self.mean is not None:
            self.mean = np.asarray(self.mean, dtype=np.float64)
            if self.mean.shape != (self.F,):
                raise ShapeError(f"mean 需为长度 {self.F} 的向量，实际 shape={self.mean.shape}")

    @property
    def T_total(self) -> int:
        return int(self.cube.shape[0])

    @property
    def N(self) -> int:
        return int(self.cube.shape[1])

    @property
    def F(self) -> int:
        return int(self.cube.shape[2])

    @property
    def stored_mean(self) -> NDArray[np.float64]:
        """未归一化的数据集视作均值为 0。"""

        return np.zeros(self.F) if self.mean is None else self.mean

    def full_range(self) -> IndexRange:
        return IndexRange(1, self.T_total)


@dataclass(frozen=True, slots=True)
class SegmentBatch:
    """一个锚点 t0 对应的三段历史输入与预测目标，均为 N×F×len 布局。"""

    hourly: NDArray[np.float64]
    daily: NDArray[np.float64]
    weekly: NDArray[np.float64]
    target: NDArray[np.float64]
    t0: int

    def segment(self, kind: str) -> NDArray[np.float64]:
        if kind not in ("hourly", "daily", "weekly"):
            raise ContractError(f"未知分段类型 {kind}")
        return getattr(self, kind)
