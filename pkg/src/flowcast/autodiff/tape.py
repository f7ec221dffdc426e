"""极简反向模式自动微分：固定算子集合上的 gradient tape（梯度磁带）。

前向时每个算子立即求值并按拓扑序记入 tape；backward 逆序遍历一次，
扇出（fan-out）处的梯度按链式法则求和。算子集合是封闭的，每条
VJP（向量-雅可比积）规则都可以被有限差分单独验证。
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from flowcast.core import get_logger
from flowcast.core.errors import ContractError, NumericalError, ShapeError
from flowcast.tensor_core import MixingMatrix, facewise_product, m_transform

logger = get_logger(__name__)

Array = NDArray[np.float64]


class OpKind(str, Enum):
    LEAF = "leaf"
    M_TRANSFORM = "m_transform"
    FACEWISE_PRODUCT = "facewise_product"
    ADD = "add"
    HADAMARD = "hadamard"
    SCALAR_SCALE = "scalar_scale"
    SIGMOID = "sigmoid"
    RELU = "relu"
    GLOBAL_MEAN = "global_mean"
    BROADCAST = "broadcast"
    TEMPORAL_PROJECTION = "temporal_projection"
    MSE_LOSS = "mse_loss"


@dataclass(slots=True, eq=False)
class Node:
    """tape 上的一个值；context 保存 backward 需要的缓存量。"""

    id: int
    op: OpKind
    inputs: Tuple["Node", ...]
    value: Array
    requires_grad: bool
    name: Optional[str] = None
    context: Dict[str, Any] = field(default_factory=dict)
    grad: Optional[Array] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    def label(self) -> str:
        return f"#{self.id}:{self.op.value}" + (f"[{self.name}]" if self.name else "")


def stable_sigmoid(values: Array) -> Array:
    """两分支写法，避免 exp 溢出。"""

    z = np.exp(-np.abs(values))
    return np.where(values >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def _swap01(tensor: Array) -> Array:
    return np.swapaxes(tensor, 0, 1)


class Tape:
    """单一所有者的计算记录；不同 tape 之间可以并发使用。"""

    def __init__(self) -> None:
        self.nodes: List[Node] = []
        self._ids = itertools.count()
        self._consumed = False

    # ---- 叶子节点 ----
    def parameter(self, value: ArrayLike, name: str) -> Node:
        """可训练叶子：backward 后一定持有同形状梯度。"""

        return self._record(OpKind.LEAF, (), np.asarray(value, dtype=np.float64), name=name, leaf_grad=True)

    def constant(self, value: ArrayLike, name: Optional[str] = None) -> Node:
        return self._record(OpKind.LEAF, (), np.asarray(value, dtype=np.float64), name=name, leaf_grad=False)

    # ---- 算子 ----
    def m_transform(self, x: Node, matrix: MixingMatrix | Array, *, inverse: bool = False) -> Node:
        """x ×₃ M；inverse=True 时使用 M⁻¹。"""

        if isinstance(matrix, MixingMatrix):
            dense = matrix.inverse if inverse else matrix.entries
        else:
            dense = np.asarray(matrix, dtype=np.float64)
            if inverse:
                raise ContractError("inverse=True 仅支持 MixingMatrix")
        return self._record(OpKind.M_TRANSFORM, (x,), m_transform(x.value, dense), matrix=dense)

    def facewise(self, a: Node, b: Node) -> Node:
        return self._record(OpKind.FACEWISE_PRODUCT, (a, b), facewise_product(a.value, b.value))

    def add(self, a: Node, b: Node) -> Node:
        _same_shape("add", a, b)
        return self._record(OpKind.ADD, (a, b), a.value + b.value)

    def hadamard(self, a: Node, b: Node) -> Node:
        _same_shape("hadamard", a, b)
        return self._record(OpKind.HADAMARD, (a, b), a.value * b.value)

    def scale(self, x: Node, alpha: float) -> Node:
        return self._record(OpKind.SCALAR_SCALE, (x,), float(alpha) * x.value, alpha=float(alpha))

    def sigmoid(self, x: Node) -> Node:
        return self._record(OpKind.SIGMOID, (x,), stable_sigmoid(x.value))

    def relu(self, x: Node) -> Node:
        return self._record(OpKind.RELU, (x,), np.maximum(x.value, 0.0))

    def mean(self, x: Node, axes: Optional[Sequence[int]] = None) -> Node:
        """沿 axes 求均值并保留维度；axes=None 时返回 0 维标量。"""

        if axes is None:
            value = np.asarray(np.mean(x.value), dtype=np.float64)
            count = x.value.size
        else:
            axes = tuple(sorted(axes))
            value = np.mean(x.value, axis=axes, keepdims=True)
            count = int(np.prod([x.value.shape[a] for a in axes]))
        return self._record(OpKind.GLOBAL_MEAN, (x,), value, axes=axes, count=count)

    def broadcast(self, x: Node, shape: Sequence[int]) -> Node:
        """把长度为 1 的维度扩展到目标 shape，其它维度必须一致。"""

        shape = tuple(shape)
        if x.value.ndim != len(shape) or any(
            src not in (1, dst) for src, dst in zip(x.value.shape, shape)
        ):
            raise ShapeError(f"broadcast 无法把 {x.shape} 扩展到 {shape}")
        axes = tuple(i for i, (src, dst) in enumerate(zip(x.value.shape, shape)) if src != dst)
        value = np.array(np.broadcast_to(x.value, shape), dtype=np.float64)
        return self._record(OpKind.BROADCAST, (x,), value, axes=axes)

    def temporal_project(self, x: Node, projection: Node) -> Node:
        """沿时间轴的线性映射：y[i][j][s] = Σ_t x[i][j][t]·P[t][s]。"""

        if x.value.ndim != 3 or projection.value.ndim != 2 or x.shape[2] != projection.shape[0]:
            raise ShapeError(f"temporal_project 维度不匹配: X{x.shape} 与 P{projection.shape}")
        return self._record(OpKind.TEMPORAL_PROJECTION, (x, projection), x.value @ projection.value)

    def mse(self, pred: Node, target: ArrayLike) -> Node:
        target_arr = np.asarray(target, dtype=np.float64)
        if pred.shape != target_arr.shape:
            raise ShapeError(f"mse 维度不匹配: pred{pred.shape} 与 target{target_arr.shape}")
        diff = pred.value - target_arr
        value = np.asarray(np.mean(diff * diff), dtype=np.float64)
        return self._record(OpKind.MSE_LOSS, (pred,), value, diff=diff)

    def sum(self, x: Node) -> Node:
        """全局求和 = 全局均值 × 元素个数。"""

        return self.scale(self.mean(x), float(x.value.size))

    def owns(self, node: Node) -> bool:
        return node.id < len(self.nodes) and self.nodes[node.id] is node

    def backward(self, loss: Node) -> Dict[str, Array]:
        return backward(self, loss)

    # ---- 内部 ----
    def _record(
        self,
        op: OpKind,
        inputs: Tuple[Node, ...],
        value: Array,
        *,
        name: Optional[str] = None,
        leaf_grad: bool = False,
        **context: Any,
    ) -> Node:
        if self._consumed:
            raise ContractError("tape 已执行过 backward，不能继续记录")
        for item in inputs:
            if not self.owns(item):
                raise ContractError(f"节点 {item.label()} 不属于当前 tape")
        requires_grad = leaf_grad or any(item.requires_grad for item in inputs)
        node = Node(
            id=next(self._ids),
            op=op,
            inputs=inputs,
            value=value,
            requires_grad=requires_grad,
            name=name,
            context=context,
        )
        self.nodes.append(node)
        return node


def _same_shape(op: str, a: Node, b: Node) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op} 维度不匹配: {a.shape} 与 {b.shape}")


def _vjp(node: Node, upstream: Array) -> Tuple[Optional[Array], ...]:
    """返回对每个输入的梯度贡献。"""

    op = node.op
    ctx = node.context
    if op is OpKind.M_TRANSFORM:
        return (m_transform(upstream, ctx["matrix"].T),)
    if op is OpKind.FACEWISE_PRODUCT:
        a, b = node.inputs
        grad_a = facewise_product(upstream, _swap01(b.value)) if a.requires_grad else None
        grad_b = facewise_product(_swap01(a.value), upstream) if b.requires_grad else None
        return grad_a, grad_b
    if op is OpKind.ADD:
        return upstream, upstream
    if op is OpKind.HADAMARD:
        a, b = node.inputs
        return upstream * b.value, upstream * a.value
    if op is OpKind.SCALAR_SCALE:
        return (ctx["alpha"] * upstream,)
    if op is OpKind.SIGMOID:
        y = node.value
        return (y * (1.0 - y) * upstream,)
    if op is OpKind.RELU:
        (x,) = node.inputs
        return (upstream * (x.value > 0.0),)
    if op is OpKind.GLOBAL_MEAN:
        (x,) = node.inputs
        return (np.broadcast_to(upstream / ctx["count"], x.shape).copy(),)
    if op is OpKind.BROADCAST:
        axes = ctx["axes"]
        return (np.sum(upstream, axis=axes, keepdims=True) if axes else upstream,)
    if op is OpKind.TEMPORAL_PROJECTION:
        x, projection = node.inputs
        grad_x = upstream @ projection.value.T if x.requires_grad else None
        grad_p = np.tensordot(x.value, upstream, axes=([0, 1], [0, 1])) if projection.requires_grad else None
        return grad_x, grad_p
    if op is OpKind.MSE_LOSS:
        diff = ctx["diff"]
        return (upstream * 2.0 * diff / diff.size,)
    raise ContractError(f"未知算子 {op}")


def backward(tape: Tape, loss: Node) -> Dict[str, Array]:
    """从标量 loss 反向累积梯度，返回 {参数名: 梯度}。

    每个 tape 只允许 backward 一次，避免梯度重复累加。
    """

    if tape._consumed:
        raise ContractError("backward 已在该 tape 上执行过，请重新前向计算")
    if not tape.owns(loss):
        raise ContractError(f"loss 节点 {loss.label()} 不属于当前 tape")
    if loss.value.size != 1:
        raise ContractError(f"loss 必须是标量，实际 shape={loss.shape}")

    grads: Dict[int, Array] = {loss.id: np.ones_like(loss.value)}
    for node in reversed(tape.nodes[: loss.id + 1]):
        upstream = grads.pop(node.id, None)
        if upstream is None or not node.requires_grad:
            continue
        if not np.all(np.isfinite(upstream)):
            raise NumericalError(f"节点 {node.label()} 的梯度出现 NaN/Inf")
        if node.op is OpKind.LEAF:
            node.grad = np.array(upstream, dtype=np.float64)
            continue
        for item, contribution in zip(node.inputs, _vjp(node, upstream)):
            if contribution is None or not item.requires_grad:
                continue
            if item.id in grads:
                grads[item.id] = grads[item.id] + contribution
            else:
                grads[item.id] = np.asarray(contribution, dtype=np.float64)

    tape._consumed = True
    result: Dict[str, Array] = {}
    for node in tape.nodes:
        if node.op is OpKind.LEAF and node.requires_grad:
            if node.grad is None:
                node.grad = np.zeros_like(node.value)
            result[node.name or node.label()] = node.grad
    logger.debug("backward finished: %d nodes, %d parameters", len(tape.nodes), len(result))
    return result
