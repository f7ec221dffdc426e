"""邻接矩阵构造：距离转亲和度、对称化、D^{-1/2}(A+I)D^{-1/2} 归一化与时间复制。"""

from __future__ import annotations

from typing import Dict, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from flowcast.core import get_logger
from flowcast.core.errors import DataError, ParameterError, ShapeError

from .types import AdjacencyTensor, Edge, GraphTopology

logger = get_logger(__name__)


def normalize_adjacency(adjacency: ArrayLike) -> NDArray[np.float64]:
    """返回 D^{-1/2}(A+I)D^{-1/2}，D 为 (A+I) 的行和度矩阵。

    注意：该变换只应作用一次，重复调用不是恒等映射。
    """

    matrix = np.asarray(adjacency, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"邻接矩阵需为方阵，实际 shape={matrix.shape}")
    bad = np.argwhere(~np.isfinite(matrix) | (matrix < 0))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise DataError(f"邻接矩阵在 ({i}, {j}) 处为非法值 {matrix[i, j]}（需非负且有限）")

    augmented = matrix + np.eye(matrix.shape[0])
    # 加单位阵后每行度数 >= 1，不会出现除零
    inv_sqrt = 1.0 / np.sqrt(augmented.sum(axis=1))
    return augmented * np.outer(inv_sqrt, inv_sqrt)


def dense_adjacency(topology: GraphTopology) -> NDArray[np.float64]:
    """边表稠密化；有向输入按逐元素 max 对称化。"""

    matrix = np.zeros((topology.N, topology.N), dtype=np.float64)
    for edge in topology.edges:
        matrix[edge.source, edge.target] = max(matrix[edge.source, edge.target], edge.weight)
    return np.maximum(matrix, matrix.T)


def gaussian_kernel_affinity(topology: GraphTopology) -> GraphTopology:
    """距离转亲和度 w' = exp(-(cost/σ)^2)，σ 取所有 cost 的标准差。

    标准差为 0（单条边或等长边）时回退到 cost 均值。
    """

    if not topology.edges:
        return GraphTopology(N=topology.N, edges=(), unit="affinity")
    costs = topology.weights
    sigma = float(np.std(costs))
    if sigma == 0.0:
        sigma = float(np.mean(costs))
        logger.warning("Edge cost std is 0, falling back to mean cost %.4f as kernel width", sigma)
    if sigma == 0.0:
        affinities = np.ones_like(costs)
    else:
        affinities = np.exp(-np.square(costs / sigma))
    edges = tuple(
        Edge(source=edge.source, target=edge.target, weight=float(w))
        for edge, w in zip(topology.edges, affinities)
    )
    return GraphTopology(N=topology.N, edges=edges, unit="affinity")


def build_adjacency_tensor(topology: GraphTopology, T: int) -> AdjacencyTensor:
    """稠密化 -> 归一化一次 -> 沿时间复制 T 个完全相同的正面切片。"""

    if T < 1:
        raise ParameterError(f"T 需 >= 1，实际 {T}")
    normalized = normalize_adjacency(dense_adjacency(topology))
    tensor = np.repeat(normalized[:, :, np.newaxis], T, axis=2)
    tensor.setflags(write=False)
    return AdjacencyTensor(tensor=tensor, normalized=True)


def adjacency_set(topology: GraphTopology, lengths: Mapping[str, int]) -> Dict[str, AdjacencyTensor]:
    """为每个分支（hourly/daily/weekly）按各自 T 构造邻接张量。"""

    return {kind: build_adjacency_tensor(topology, length) for kind, length in lengths.items()}


def ring_topology(N: int, costs: ArrayLike | None = None) -> GraphTopology:
    """环形拓扑：i 与 (i+1) mod N 相连；N=2 时只有一条边。"""

    pairs = [(i, (i + 1) % N) for i in range(N if N > 2 else 1)]
    weights = np.ones(len(pairs)) if costs is None else np.asarray(costs, dtype=np.float64)
    if weights.shape != (len(pairs),):
        raise ShapeError(f"costs 需要 {len(pairs)} 个值，实际 shape={weights.shape}")
    edges = tuple(Edge(source=a, target=b, weight=float(w)) for (a, b), w in zip(pairs, weights))
    return GraphTopology(N=N, edges=edges)
