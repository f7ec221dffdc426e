"""图结构相关的数据类型。"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from flowcast.core.errors import DataError


@dataclass(frozen=True, slots=True)
class Edge:
    """一条检测器之间的边；weight 的单位由拓扑的 unit 字段说明。"""

    source: int
    target: int
    weight: float


@dataclass(frozen=True, slots=True)
class GraphTopology:
    """检测器网络 G=(V, E)：节点数 N 与边表，构造后不可变。"""

    N: int
    edges: Tuple[Edge, ...] = ()
    unit: str = "distance"

    def __post_init__(self) -> None:
        if self.N < 1:
            raise DataError(f"节点数 N 需为正整数，实际 {self.N}")
        for idx, edge in enumerate(self.edges):
            for node in (edge.source, edge.target):
                if not 0 <= node < self.N:
                    raise DataError(f"边 #{idx} 的节点 id={node} 超出 [0, {self.N})")
            if edge.source == edge.target:
                raise DataError(f"边 #{idx} 是自环 ({edge.source})，自环由归一化统一加入")
            if not math.isfinite(edge.weight) or edge.weight < 0:
                raise DataError(f"边 #{idx} 权重非法: {edge.weight}")

    @property
    def weights(self) -> NDArray[np.float64]:
        return np.array([edge.weight for edge in self.edges], dtype=np.float64)


@dataclass(frozen=True, slots=True)
class AdjacencyTensor:
    """N×N×T 邻接张量；normalized 表示每个正面切片都已做对称归一化。"""

    tensor: NDArray[np.float64]
    normalized: bool

    @property
    def N(self) -> int:
        return int(self.tensor.shape[0])

    @property
    def T(self) -> int:
        return int(self.tensor.shape[2])
