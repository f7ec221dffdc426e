"""模型参数容器与结构描述（ModelSpec）。

参数统一存放在扁平字典 name -> ndarray 中，命名规则：
  {kind}.layer{i}.W              TM-GCN 权重张量 F_in×F_out×T
  {kind}.P                       时间投影矩阵 T_branch×T_p
  fusion{s}.{global|local}_{down|up}   AFF 特征混合矩阵（第三维为 1）
  head.W                         输出头 hidden_f×f_out×1
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, Literal, Mapping, Tuple

import numpy as np
from numpy.typing import NDArray

from flowcast.core import ForecastConfig, SEGMENT_KINDS, get_logger
from flowcast.core.errors import ContractError, DataError, ShapeError
from flowcast.tensor_core import MixingMatrix, banded_m

logger = get_logger(__name__)

Activation = Literal["relu", "sigmoid", "identity"]
Array = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class TmgcnLayerParams:
    W: Array
    activation: Activation = "relu"

    def __post_init__(self) -> None:
        if self.W.ndim != 3:
            raise ShapeError(f"W 需为 F_in×F_out×T，实际 shape={self.W.shape}")
        if not np.all(np.isfinite(self.W)):
            raise DataError("W 含 NaN/Inf")


@dataclass(frozen=True, slots=True)
class BranchConfig:
    """单个分段分支：长度 T、层数、隐藏宽度以及该分支的 M。"""

    kind: str
    T: int
    layers: int
    hidden_f: int
    mixing: MixingMatrix

    def __post_init__(self) -> None:
        if self.kind not in SEGMENT_KINDS:
            raise ContractError(f"未知分支类型 {self.kind}")
        if self.mixing.T != self.T:
            raise ShapeError(f"{self.kind} 分支 M.T={self.mixing.T} 与 T={self.T} 不一致")
        if self.layers < 1:
            raise ContractError(f"{self.kind} 分支层数需 >= 1")


@dataclass(frozen=True, slots=True)
class AffParams:
    """一次 AFF 融合的四个特征混合矩阵；瓶颈宽度为 ceil(F / r)。"""

    global_down: Array
    global_up: Array
    local_down: Array
    local_up: Array
    r: int

    @property
    def width(self) -> int:
        return int(self.global_down.shape[0])

    @property
    def bottleneck(self) -> int:
        return int(self.global_down.shape[1])


def bottleneck_width(features: int, r: int) -> int:
    return max(1, math.ceil(features / r))


@dataclass(frozen=True, slots=True)
class ModelSpec:
    """由配置派生的网络结构；所有形状都可以从这里推出。"""

    f_in: int
    f_out: int
    hidden_f: int
    T_p: int
    r: int
    activation: Activation
    fusion_order: Tuple[str, str, str]
    branches: Dict[str, BranchConfig] = field(default_factory=dict)

    @classmethod
    def from_config(cls, cfg: ForecastConfig, f_in: int) -> "ModelSpec":
        if cfg.f_out > f_in:
            raise ShapeError(f"f_out={cfg.f_out} 不能超过输入特征数 F={f_in}")
        branches = {
            kind: BranchConfig(
                kind=kind,
                T=length,
                layers=cfg.layers,
                hidden_f=cfg.hidden_f,
                mixing=banded_m(length, cfg.bandwidth),
            )
            for kind, length in cfg.branch_lengths().items()
        }
        return cls(
            f_in=f_in,
            f_out=cfg.f_out,
            hidden_f=cfg.hidden_f,
            T_p=cfg.T_p,
            r=cfg.r,
            activation=cfg.activation,
            fusion_order=tuple(cfg.fusion_order),  # type: ignore[arg-type]
            branches=branches,
        )

    def layer_activation(self, index: int, layers: int) -> Activation:
        """隐藏层用配置的激活，分支最后一层恒为 identity。"""

        return "identity" if index == layers - 1 else self.activation

    def param_shapes(self) -> Dict[str, Tuple[int, ...]]:
        shapes: Dict[str, Tuple[int, ...]] = {}
        for kind in SEGMENT_KINDS:
            branch = self.branches[kind]
            for i in range(branch.layers):
                f_in = self.f_in if i == 0 else branch.hidden_f
                shapes[f"{kind}.layer{i}.W"] = (f_in, branch.hidden_f, branch.T)
            shapes[f"{kind}.P"] = (branch.T, self.T_p)
        mid = bottleneck_width(self.hidden_f, self.r)
        for stage in (0, 1):
            for scope in ("global", "local"):
                shapes[f"fusion{stage}.{scope}_down"] = (self.hidden_f, mid, 1)
                shapes[f"fusion{stage}.{scope}_up"] = (mid, self.hidden_f, 1)
        shapes["head.W"] = (self.hidden_f, self.f_out, 1)
        return shapes


@dataclass(slots=True)
class ModelParams:
    """全部可学习参数；训练循环是唯一的写入方。"""

    spec: ModelSpec
    values: Dict[str, Array]

    def __post_init__(self) -> None:
        expected = self.spec.param_shapes()
        missing = sorted(set(expected) - set(self.values))
        extra = sorted(set(self.values) - set(expected))
        if missing or extra:
            raise ShapeError(f"参数名不匹配: 缺少 {missing}，多余 {extra}")
        for name, shape in expected.items():
            actual = tuple(self.values[name].shape)
            if actual != shape:
                raise ShapeError(f"参数 {name} 维度不匹配: 期望 {shape}，实际 {actual}")
            if not np.all(np.isfinite(self.values[name])):
                raise DataError(f"参数 {name} 含 NaN/Inf")

    def named(self) -> Dict[str, Array]:
        return self.values

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def copy(self) -> "ModelParams":
        return ModelParams(spec=self.spec, values={k: v.copy() for k, v in self.values.items()})

    def layer(self, kind: str, index: int) -> TmgcnLayerParams:
        branch = self.spec.branches[kind]
        return TmgcnLayerParams(
            W=self.values[f"{kind}.layer{index}.W"],
            activation=self.spec.layer_activation(index, branch.layers),
        )

    def projection(self, kind: str) -> Array:
        return self.values[f"{kind}.P"]

    def fusion(self, stage: int) -> AffParams:
        prefix = f"fusion{stage}"
        return AffParams(
            global_down=self.values[f"{prefix}.global_down"],
            global_up=self.values[f"{prefix}.global_up"],
            local_down=self.values[f"{prefix}.local_down"],
            local_up=self.values[f"{prefix}.local_up"],
            r=self.spec.r,
        )

    def dims(self) -> Dict[str, Tuple[int, ...]]:
        return {name: tuple(value.shape) for name, value in self.values.items()}

    def max_abs_diff(self, other: "ModelParams") -> float:
        return max(float(np.max(np.abs(self.values[k] - other.values[k]))) for k in self.values)


def init_params(spec: ModelSpec, seed: int) -> ModelParams:
    """权重按切片 uniform(±sqrt(6/(F_in+F_out)))，P 取平均映射 1/T_branch。"""

    rng = np.random.default_rng(seed)
    values: Dict[str, Array] = {}
    for name, shape in spec.param_shapes().items():
        if name.endswith(".P"):
            values[name] = np.full(shape, 1.0 / shape[0], dtype=np.float64)
            continue
        bound = math.sqrt(6.0 / (shape[0] + shape[1]))
        values[name] = rng.uniform(-bound, bound, size=shape)
    logger.info(
        "Initialized %d parameter tensors (%d scalars), seed=%d",
        len(values),
        sum(v.size for v in values.values()),
        seed,
    )
    return ModelParams(spec=spec, values=values)


def params_from_arrays(spec: ModelSpec, arrays: Mapping[str, Array]) -> ModelParams:
    return ModelParams(spec=spec, values={k: np.array(v, dtype=np.float64) for k, v in arrays.items()})
