"""TM-GCN 层与时间投影：在 tape 上组合 M-product 算子。"""

from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.typing import NDArray

from flowcast.autodiff import Node, Tape
from flowcast.core.errors import ContractError, ShapeError
from flowcast.graph import AdjacencyTensor
from flowcast.tensor_core import MixingMatrix, as_tensor3

from .params import Activation, TmgcnLayerParams

Array = NDArray[np.float64]


def _activate(tape: Tape, node: Node, activation: Activation) -> Node:
    if activation == "relu":
        return tape.relu(node)
    if activation == "sigmoid":
        return tape.sigmoid(node)
    if activation == "identity":
        return node
    raise ContractError(f"未知激活函数 {activation}")


def m_product_node(tape: Tape, left: Node, right: Node, mixing: MixingMatrix) -> Node:
    """tape 版 M-product：变换、逐面乘、逆变换。"""

    product = tape.facewise(tape.m_transform(left, mixing), tape.m_transform(right, mixing))
    return tape.m_transform(product, mixing, inverse=True)


def tmgcn_layer_node(
    tape: Tape,
    x: Node,
    adjacency: Node,
    weight: Node,
    activation: Activation,
    mixing: MixingMatrix,
) -> Node:
    """σ̂(A ⊙ X ⊙ W)，激活在变换域逐元素作用后再乘 M⁻¹。"""

    n, f_in, T = x.shape
    if adjacency.shape != (n, n, T):
        raise ShapeError(f"邻接张量 {adjacency.shape} 与 X{x.shape} 不匹配，需 N×N×T=({n}, {n}, {T})")
    if weight.shape[0] != f_in or weight.shape[2] != T:
        raise ShapeError(f"权重张量 {weight.shape} 与 X{x.shape} 不匹配，需 F_in={f_in}, T={T}")
    if mixing.T != T:
        raise ShapeError(f"M.T={mixing.T} 与分段长度 T={T} 不一致")

    propagated = m_product_node(tape, adjacency, x, mixing)
    transformed = tape.facewise(tape.m_transform(propagated, mixing), tape.m_transform(weight, mixing))
    return tape.m_transform(_activate(tape, transformed, activation), mixing, inverse=True)


def tmgcn_layer_forward(
    X: Array,
    A: AdjacencyTensor,
    params: TmgcnLayerParams,
    M: MixingMatrix,
    *,
    tape: Optional[Tape] = None,
) -> Array:
    if not A.normalized:
        raise ContractError("tmgcn_layer_forward 需要已归一化的邻接张量")
    tape = tape or Tape()
    out = tmgcn_layer_node(
        tape,
        tape.constant(as_tensor3(X), name="X"),
        tape.constant(A.tensor, name="A"),
        tape.constant(params.W, name="W"),
        params.activation,
        M,
    )
    return out.value


def temporal_project(X: Array, P: Array) -> Array:
    """result[i][j][s] = Σ_t X[i][j][t]·P[t][s]。"""

    tape = Tape()
    return tape.temporal_project(tape.constant(as_tensor3(X)), tape.constant(P)).value
