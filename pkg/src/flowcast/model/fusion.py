"""注意力特征融合（AFF）：多尺度通道注意力生成权重 H，输出 H⊗X1 + (1−H)⊗X2。"""

from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.typing import NDArray

from flowcast.autodiff import Node, Tape
from flowcast.core.errors import ContractError, ShapeError
from flowcast.tensor_core import as_tensor3

from .params import AffParams

Array = NDArray[np.float64]


def feature_mix(tape: Tape, x: Node, weight: Node) -> Node:
    """逐位置的特征混合 X[:, :, t] @ W，W 的第三维为 1，必要时沿时间广播。"""

    d1, features, T = x.shape
    f_in, f_out, depth = weight.shape
    if f_in != features or depth != 1:
        raise ShapeError(f"特征混合矩阵 {weight.shape} 与输入 {x.shape} 不匹配")
    if T != 1:
        weight = tape.broadcast(weight, (f_in, f_out, T))
    return tape.facewise(x, weight)


def attention_weights(tape: Tape, fused: Node, weights: dict[str, Node]) -> Node:
    """H = sigmoid(全局上下文 + 局部上下文)。

    全局：对节点与时间取均值得到 1×F×1，经 F→F/r→F 瓶颈后广播。
    局部：每个 (节点, 时间) 位置独立做同样的瓶颈映射。
    """

    pooled = tape.mean(fused, axes=(0, 2))
    global_hidden = tape.relu(feature_mix(tape, pooled, weights["global_down"]))
    global_ctx = feature_mix(tape, global_hidden, weights["global_up"])
    local_hidden = tape.relu(feature_mix(tape, fused, weights["local_down"]))
    local_ctx = feature_mix(tape, local_hidden, weights["local_up"])
    return tape.sigmoid(tape.add(tape.broadcast(global_ctx, fused.shape), local_ctx))


def aff_node(
    tape: Tape,
    x1: Node,
    x2: Node,
    weights: dict[str, Node],
    *,
    forced_weight: Optional[float] = None,
) -> Node:
    """forced_weight 仅用于测试：把 H 固定为常数，跳过注意力计算。"""

    if x1.shape != x2.shape:
        raise ShapeError(f"aff_fuse 输入维度不一致: {x1.shape} 与 {x2.shape}")
    if forced_weight is None:
        h = attention_weights(tape, tape.add(x1, x2), weights)
    else:
        if not 0.0 <= forced_weight <= 1.0:
            raise ContractError(f"forced_weight 需位于 [0, 1]，实际 {forced_weight}")
        h = tape.constant(np.full(x1.shape, float(forced_weight)), name="H")
    complement = tape.add(tape.constant(np.ones(x1.shape)), tape.scale(h, -1.0))
    return tape.add(tape.hadamard(h, x1), tape.hadamard(complement, x2))


def aff_fuse(
    X1: Array,
    X2: Array,
    params: AffParams,
    *,
    forced_weight: Optional[float] = None,
) -> Array:
    tape = Tape()
    weights = {
        "global_down": tape.constant(params.global_down),
        "global_up": tape.constant(params.global_up),
        "local_down": tape.constant(params.local_down),
        "local_up": tape.constant(params.local_up),
    }
    x1 = tape.constant(as_tensor3(X1), name="X1")
    x2 = tape.constant(as_tensor3(X2), name="X2")
    return aff_node(tape, x1, x2, weights, forced_weight=forced_weight).value


def attention_map(X1: Array, X2: Array, params: AffParams) -> Array:
    """返回融合时实际使用的 H，便于检查其取值位于 (0, 1)。"""

    tape = Tape()
    weights = {
        name: tape.constant(getattr(params, name))
        for name in ("global_down", "global_up", "local_down", "local_up")
    }
    fused = tape.add(tape.constant(as_tensor3(X1)), tape.constant(as_tensor3(X2)))
    return attention_weights(tape, fused, weights).value
