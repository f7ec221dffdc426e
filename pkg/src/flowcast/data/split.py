"""按时间顺序切分训练/验证/测试区间，并计算各区间的合法锚点。"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

from flowcast.core.errors import ConfigError

from .types import IndexRange

PARTITIONS = ("train", "val", "test")


@dataclass(frozen=True, slots=True)
class SplitPlan:
    """三段连续区间及各自的锚点区间。"""

    train: IndexRange
    val: IndexRange
    test: IndexRange
    anchors: Dict[str, IndexRange]

    def partition(self, name: str) -> IndexRange:
        return getattr(self, name)

    def anchor_list(self, name: str) -> List[int]:
        return list(self.anchors[name])

    def to_dict(self) -> Dict[str, Dict[str, List[int]]]:
        return {
            name: {"range": self.partition(name).to_list(), "anchors": self.anchors[name].to_list()}
            for name in PARTITIONS
        }


def _half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def chronological_split(T_total: int, ratios: Sequence[float]) -> tuple[IndexRange, IndexRange, IndexRange]:
    """按累计比例四舍五入切分 [1, T_total]，三段首尾相接、互不重叠。"""

    if len(ratios) != 3:
        raise ConfigError(f"split 需要 3 个比例，实际 {len(ratios)}")
    if any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split={tuple(ratios)} 需全部为正且总和为 1")
    first = _half_up(T_total * ratios[0])
    second = _half_up(T_total * (ratios[0] + ratios[1]))
    if not 1 <= first < second < T_total:
        raise ConfigError(f"T_total={T_total} 太短，无法按 {tuple(ratios)} 切出三段非空区间")
    return IndexRange(1, first), IndexRange(first + 1, second), IndexRange(second + 1, T_total)


def anchor_range(partition: IndexRange, min_t0: int, T_p: int, *, name: str = "partition") -> IndexRange:
    """目标窗口 [t0+1, t0+T_p] 必须完全落在本区间内，且 t0 >= min_t0。"""

    lowest = max(min_t0, partition.start - 1, 1)
    highest = partition.stop - T_p
    if highest < lowest:
        raise ConfigError(
            f"{name} 区间 {partition.to_list()} 太小，无法容纳一个样本"
            f"（需要 t0 ∈ [{lowest}, {highest}]）"
        )
    return IndexRange(lowest, highest)


def plan_split(T_total: int, ratios: Sequence[float], min_t0: int, T_p: int) -> SplitPlan:
    train, val, test = chronological_split(T_total, ratios)
    anchors = {
        name: anchor_range(part, min_t0, T_p, name=name)
        for name, part in zip(PARTITIONS, (train, val, test))
    }
    return SplitPlan(train=train, val=val, test=test, anchors=anchors)
