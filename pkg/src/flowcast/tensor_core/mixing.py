"""混合矩阵 M：下三角带状构造与逆矩阵预计算。"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import solve_triangular

from flowcast.core.errors import NumericalError, ParameterError, ShapeError

_INVERSE_TOL = 1e-10


@dataclass(frozen=True, slots=True)
class MixingMatrix:
    """T×T 可逆下三角混合矩阵及其逆（构造时一次性求出）。

    - b: 带宽；由 ``banded_m`` 生成时记录，其它来源为 None。
    - columns: 每行非零列下标，m_transform 只沿这些列累加。
    """

    T: int
    entries: NDArray[np.float64]
    inverse: NDArray[np.float64]
    b: Optional[int] = None
    columns: Tuple[NDArray[np.intp], ...] = field(default=(), repr=False)

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, np.eye(self.T)))


def _row_columns(matrix: NDArray[np.float64]) -> Tuple[NDArray[np.intp], ...]:
    return tuple(np.flatnonzero(row) for row in matrix)


def mixing_matrix(entries: ArrayLike, *, b: Optional[int] = None) -> MixingMatrix:
    """包装任意可逆下三角矩阵；逆矩阵由前代法（forward substitution）求得。"""

    matrix = np.array(entries, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise ShapeError(f"混合矩阵需为非空方阵，实际 shape={matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NumericalError("混合矩阵含 NaN/Inf")
    if np.any(np.triu(matrix, k=1) != 0.0):
        raise ShapeError("混合矩阵必须是下三角矩阵")
    diag = np.diag(matrix)
    if np.any(diag == 0.0):
        raise NumericalError(f"混合矩阵奇异：对角线第 {int(np.argmin(np.abs(diag))) + 1} 个元素为 0")

    size = matrix.shape[0]
    inverse = solve_triangular(matrix, np.eye(size), lower=True, check_finite=False)
    residual = float(np.max(np.abs(matrix @ inverse - np.eye(size))))
    if not np.isfinite(residual) or residual > _INVERSE_TOL:
        raise NumericalError(f"混合矩阵求逆残差 {residual:.3e} 超过 {_INVERSE_TOL:.0e}")

    matrix.setflags(write=False)
    inverse.setflags(write=False)
    return MixingMatrix(T=size, entries=matrix, inverse=inverse, b=b, columns=_row_columns(matrix))


def banded_m(T: int, b: int) -> MixingMatrix:
    """带宽为 b 的下三角带状 M：每行对最近 min(b, t) 个切片取平均。

    1-based 写法：M[t][k] = 1/min(b, t)，当 max(1, t-b+1) <= k <= t；否则为 0。
    """

    if isinstance(T, bool) or not isinstance(T, (int, np.integer)) or T < 1:
        raise ParameterError(f"T 需为正整数，实际 {T!r}")
    if isinstance(b, bool) or not isinstance(b, (int, np.integer)) or not 1 <= b <= T:
        raise ParameterError(f"bandwidth b={b!r} 超出有效区间 [1, {T}]")

    entries = np.zeros((T, T), dtype=np.float64)
    for t in range(T):
        width = min(b, t + 1)
        entries[t, t - width + 1 : t + 1] = 1.0 / width
    return mixing_matrix(entries, b=int(b))


def identity_m(T: int) -> MixingMatrix:
    return banded_m(T, 1)
