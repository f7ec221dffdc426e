"""多分段模型前向：三个分段分支 -> 时间投影 -> 两次 AFF 融合 -> 输出头。"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from flowcast.autodiff import Node, Tape
from flowcast.core import SEGMENT_KINDS, get_logger
from flowcast.core.errors import ContractError, ShapeError
from flowcast.data.types import SegmentBatch
from flowcast.graph import AdjacencyTensor

from .fusion import aff_node, feature_mix
from .layers import tmgcn_layer_node
from .params import ModelParams, ModelSpec

logger = get_logger(__name__)

Array = NDArray[np.float64]
AFF_KEYS = ("global_down", "global_up", "local_down", "local_up")


def bind_params(tape: Tape, params: ModelParams, *, trainable: bool = True) -> Dict[str, Node]:
    """把参数登记为 tape 叶子；trainable=False 时作为常量，不求梯度。"""

    if trainable:
        return {name: tape.parameter(value, name=name) for name, value in params.values.items()}
    return {name: tape.constant(value, name=name) for name, value in params.values.items()}


def bind_adjacency(
    tape: Tape, adjacency_set: Mapping[str, AdjacencyTensor], spec: ModelSpec
) -> Dict[str, Node]:
    nodes: Dict[str, Node] = {}
    for kind in SEGMENT_KINDS:
        if kind not in adjacency_set:
            raise ContractError(f"缺少 {kind} 分支的邻接张量")
        adjacency = adjacency_set[kind]
        if not adjacency.normalized:
            raise ContractError(f"{kind} 分支的邻接张量未归一化")
        if adjacency.T != spec.branches[kind].T:
            raise ShapeError(
                f"{kind} 分支邻接张量 T={adjacency.T} 与分支长度 T={spec.branches[kind].T} 不一致"
            )
        nodes[kind] = tape.constant(adjacency.tensor, name=f"A.{kind}")
    return nodes


def _check_batch(batch: SegmentBatch, spec: ModelSpec, n: int) -> None:
    for kind in SEGMENT_KINDS:
        expected = (n, spec.f_in, spec.branches[kind].T)
        actual = batch.segment(kind).shape
        if actual != expected:
            raise ShapeError(f"{kind} 分段维度 {actual} 与模型期望 {expected} 不一致")


def branch_node(
    tape: Tape,
    kind: str,
    segment: Node,
    adjacency: Node,
    nodes: Mapping[str, Node],
    spec: ModelSpec,
) -> Node:
    """单个分支：堆叠的 TM-GCN 层，然后把长度 T_branch 投影到 T_p。"""

    branch = spec.branches[kind]
    hidden = segment
    for i in range(branch.layers):
        hidden = tmgcn_layer_node(
            tape,
            hidden,
            adjacency,
            nodes[f"{kind}.layer{i}.W"],
            spec.layer_activation(i, branch.layers),
            branch.mixing,
        )
    return tape.temporal_project(hidden, nodes[f"{kind}.P"])


def forward_nodes(
    tape: Tape,
    batch: SegmentBatch,
    adjacency: Mapping[str, Node],
    nodes: Mapping[str, Node],
    spec: ModelSpec,
    *,
    fusion_override: Optional[float] = None,
) -> Node:
    """在给定 tape 上构建一次完整前向，返回 N×f_out×T_p 预测节点。"""

    outputs = {
        kind: branch_node(
            tape, kind, tape.constant(batch.segment(kind), name=kind), adjacency[kind], nodes, spec
        )
        for kind in SEGMENT_KINDS
    }
    first, second, third = spec.fusion_order
    stages = [{key: nodes[f"fusion{s}.{key}"] for key in AFF_KEYS} for s in (0, 1)]
    fused = aff_node(tape, outputs[first], outputs[second], stages[0], forced_weight=fusion_override)
    fused = aff_node(tape, fused, outputs[third], stages[1], forced_weight=fusion_override)
    return feature_mix(tape, fused, nodes["head.W"])


def model_forward(
    batch: SegmentBatch,
    adjacency_set: Mapping[str, AdjacencyTensor],
    params: ModelParams,
    *,
    fusion_override: Optional[float] = None,
) -> Array:
    """纯函数前向：不修改参数，可在多个线程中对不同 batch 并发调用。"""

    spec = params.spec
    tape = Tape()
    adjacency = bind_adjacency(tape, adjacency_set, spec)
    _check_batch(batch, spec, adjacency["hourly"].shape[0])
    nodes = bind_params(tape, params, trainable=False)
    return forward_nodes(tape, batch, adjacency, nodes, spec, fusion_override=fusion_override).value


def predict(
    params: ModelParams,
    adjacency_set: Mapping[str, AdjacencyTensor],
    batches: Sequence[SegmentBatch],
    *,
    workers: int = 1,
) -> List[Array]:
    """批量推理；workers > 1 时用线程池并发，结果顺序与输入一致。"""

    if workers <= 1 or len(batches) <= 1:
        return [model_forward(batch, adjacency_set, params) for batch in batches]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda batch: model_forward(batch, adjacency_set, params), batches))
