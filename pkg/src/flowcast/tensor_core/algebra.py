"""M-product 代数：M 变换、逐面乘积（face-wise product）与 M-product。

所有函数均为纯函数，不修改输入；累加顺序固定（按行内非零列升序），
因此同一机器上结果逐位可复现。多线程并行时同样保证各容差成立，
但不承诺不同线程数之间逐位一致。
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray

from flowcast.core.errors import ShapeError

from .mixing import MixingMatrix, _row_columns
from .tensor import DenseTensor3, describe

MatrixLike = Union[MixingMatrix, NDArray[np.float64]]


def _resolve(matrix: MatrixLike) -> tuple[NDArray[np.float64], Sequence[NDArray[np.intp]]]:
    if isinstance(matrix, MixingMatrix):
        return matrix.entries, matrix.columns
    dense = np.asarray(matrix, dtype=np.float64)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ShapeError(f"M 需为 T×T 方阵，实际 shape={dense.shape}")
    return dense, _row_columns(dense)


def m_transform(tensor: DenseTensor3, matrix: MatrixLike) -> DenseTensor3:
    """mode-3 乘积 A ×₃ M：result[i][j][t] = Σ_k M[t][k]·A[i][j][k]。

    只遍历每行的非零列，带状 M 的代价为 O(d1·d2·T·b)。
    """

    dense, columns = _resolve(matrix)
    if tensor.ndim != 3 or tensor.shape[2] != dense.shape[0]:
        raise ShapeError(
            f"m_transform 维度不匹配: A{describe(tensor)} 与 M{describe(dense)}，需 A.d3 == T"
        )
    d1, d2, size = tensor.shape
    result = np.zeros((d1, d2, size), dtype=np.float64)
    for t in range(size):
        acc = np.zeros((d1, d2), dtype=np.float64)
        for k in columns[t]:
            acc += dense[t, k] * tensor[:, :, k]
        result[:, :, t] = acc
    return result


def m_transform_inverse(tensor: DenseTensor3, matrix: MixingMatrix) -> DenseTensor3:
    """A ×₃ M⁻¹，使用构造时预计算的逆矩阵。"""

    if tensor.ndim != 3 or tensor.shape[2] != matrix.T:
        raise ShapeError(
            f"m_transform_inverse 维度不匹配: A{describe(tensor)} 与 M(T={matrix.T})"
        )
    return m_transform(tensor, matrix.inverse)


def facewise_product(left: DenseTensor3, right: DenseTensor3) -> DenseTensor3:
    """逐正面切片矩阵乘：result[:, :, t] = left[:, :, t] @ right[:, :, t]。"""

    if left.ndim != 3 or right.ndim != 3:
        raise ShapeError(f"facewise_product 需要三阶张量: {describe(left)} 与 {describe(right)}")
    if left.shape[1] != right.shape[0]:
        raise ShapeError(
            f"facewise_product 内维不匹配: A{describe(left)} 与 B{describe(right)}，需 A.d2 == B.d1"
        )
    if left.shape[2] != right.shape[2]:
        raise ShapeError(
            f"facewise_product 切片数不匹配: A{describe(left)} 与 B{describe(right)}，需 A.d3 == B.d3"
        )
    stacked = np.matmul(np.moveaxis(left, 2, 0), np.moveaxis(right, 2, 0))
    return np.ascontiguousarray(np.moveaxis(stacked, 0, 2))


def m_product(left: DenseTensor3, right: DenseTensor3, matrix: MixingMatrix) -> DenseTensor3:
    """M-product：((A ×₃ M) Δ (B ×₃ M)) ×₃ M⁻¹，Δ 为逐面乘积。"""

    for name, operand in (("A", left), ("B", right)):
        if operand.ndim != 3 or operand.shape[2] != matrix.T:
            raise ShapeError(f"m_product 的 {name}{describe(operand)} 切片数需等于 M.T={matrix.T}")
    transformed = facewise_product(m_transform(left, matrix), m_transform(right, matrix))
    return m_transform_inverse(transformed, matrix)
