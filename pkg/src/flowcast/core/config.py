"""配置加载工具，集中管理仓内/环境参数。

配置文件既可以是 YAML 也可以是 JSON（YAML 是 JSON 的超集），键名与
CLI（命令行）`--config` 约定一致：q, T_p, T_h, T_d, T_w, bandwidth, layers,
hidden_f, r, split, seed, lr, epochs, batch_size, fusion_order 等。
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Mapping, MutableMapping, Optional, Sequence, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .paths import REPO_ROOT

CONFIG_ENV_KEY = "FLOWCAST_CONFIG_PATH"

SEGMENT_KINDS: Tuple[str, str, str] = ("hourly", "daily", "weekly")


def _load_local_env() -> None:
    """最小 .env 解析器，避免额外依赖。"""

    env_path = REPO_ROOT / ".env"
    if not env_path.exists():
        return
    for line in env_path.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            continue
        key, value = stripped.split("=", 1)
        key = key.strip()
        value = value.strip().strip('"')
        if key and key not in os.environ:
            os.environ[key] = value


_load_local_env()


class SyntheticConfig(BaseModel):
    """合成数据生成参数，默认值对应桌面规模验收配置。"""

    num_nodes: int = Field(4, ge=2)
    days: int = Field(15, ge=15)
    noise: float = Field(2.0, ge=0.0)
    coupling: float = Field(0.3, ge=0.0)
    weekly_amplitude: float = Field(0.3, ge=0.0)
    features: int = Field(1, ge=1)


class ForecastConfig(BaseModel):
    """聚合数据、模型、训练与评估参数。"""

    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    # 数据与分段
    q: int = Field(288, ge=4)
    T_p: int = Field(12, ge=1)
    T_h: int = Field(12, ge=1)
    T_d: int = Field(12, ge=1)
    T_w: int = Field(12, ge=1)
    split: Tuple[float, float, float] = (0.6, 0.2, 0.2)
    f_out: int = Field(1, ge=1)
    dataset_path: Optional[Path] = None
    mask_path: Optional[Path] = None
    adjacency_path: Optional[Path] = None
    num_nodes: Optional[int] = Field(None, ge=1)
    gaussian_kernel: bool = True
    synthetic: SyntheticConfig = Field(default_factory=SyntheticConfig)

    # 模型
    bandwidth: int = Field(12, ge=1)
    layers: int = Field(2, ge=1)
    hidden_f: int = Field(16, ge=1)
    r: int = Field(4, ge=1)
    activation: Literal["relu", "sigmoid", "identity"] = "relu"
    fusion_order: Tuple[str, str, str] = SEGMENT_KINDS

    # 训练
    seed: int = 0
    lr: float = Field(1e-3, ge=0.0)
    epochs: int = Field(100, ge=0)
    batch_size: int = Field(16, ge=1)
    optimizer: Literal["sgd", "adam"] = "adam"
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    eps: float = Field(1e-8, gt=0.0)
    patience: Optional[int] = Field(None, ge=1)
    grad_clip: Optional[float] = Field(5.0, gt=0.0)
    prefetch: int = Field(2, ge=0)

    # 评估
    horizons: Optional[List[int]] = None
    workers: int = Field(1, ge=1)

    raw: Dict[str, Any] = Field(default_factory=dict, description="原始配置字典，便于调试。")

    @model_validator(mode="after")
    def _check_consistency(self) -> "ForecastConfig":
        for name in ("T_h", "T_d", "T_w"):
            length = getattr(self, name)
            if length % self.T_p != 0:
                raise ValueError(f"{name}={length} 必须是 T_p={self.T_p} 的整数倍")
        if self.T_p > self.q:
            raise ValueError(f"T_p={self.T_p} 不能超过每日采样数 q={self.q}")
        max_b = min(self.T_h, self.T_d, self.T_w)
        if not 1 <= self.bandwidth <= max_b:
            raise ValueError(f"bandwidth={self.bandwidth} 需位于区间 [1, {max_b}]")
        if any(part <= 0 for part in self.split) or abs(sum(self.split) - 1.0) > 1e-9:
            raise ValueError(f"split={self.split} 需全部为正且总和为 1")
        if sorted(self.fusion_order) != sorted(SEGMENT_KINDS):
            raise ValueError(f"fusion_order={self.fusion_order} 必须是 {SEGMENT_KINDS} 的排列")
        if self.patience is not None and self.patience > self.epochs:
            raise ValueError(f"patience={self.patience} 不能超过 epochs={self.epochs}")
        if self.horizons is not None:
            bad = [h for h in self.horizons if not 1 <= h <= self.T_p]
            if bad or not self.horizons:
                raise ValueError(f"horizons 需位于 [1, {self.T_p}]，非法值: {bad}")
        return self

    def model_post_init(self, __context: Any) -> None:  # type: ignore[override]
        # 保留原始配置便于后续 diff/日志输出
        if not self.raw:
            self.raw = self.to_raw_dict()

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ForecastConfig":
        """校验配置字典，把 pydantic 的 ValidationError 统一转成 ConfigError。"""

        try:
            return cls.model_validate(dict(data))
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc

    def with_updates(self, **updates: Any) -> "ForecastConfig":
        """返回覆盖部分字段后的新配置（带完整校验），sweep 时逐个替换 bandwidth。"""

        payload = self.to_raw_dict()
        payload.update(updates)
        return ForecastConfig.from_dict(payload)

    def to_raw_dict(self) -> Dict[str, Any]:
        """导出基础 dict，供日志、报告与 hash 使用。"""

        return self.model_dump(mode="json", exclude={"raw"})

    def branch_lengths(self) -> Dict[str, int]:
        return {"hourly": self.T_h, "daily": self.T_d, "weekly": self.T_w}

    def horizon_steps(self) -> List[int]:
        """报告用的预测步：默认取 T_p 的 1/4、2/4、3/4、4/4（至少为 1）。"""

        if self.horizons is not None:
            return sorted(set(self.horizons))
        return sorted({max(1, self.T_p * k // 4) for k in range(1, 5)})


def config_hash(cfg: ForecastConfig) -> str:
    """配置摘要：规范化 JSON 的 SHA-256 前 16 位。"""

    canonical = json.dumps(cfg.to_raw_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _default_config_path() -> Path:
    return REPO_ROOT / "configs" / "baseline.yaml"


def _load_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"配置文件不存在: {path}")
    with path.open("r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"配置文件 {path} 内容需为字典")
        return data


ENV_OVERRIDE_MAP: Dict[str, Tuple[Sequence[str], Callable[[str], Any]]] = {
    "FLOWCAST_SEED": (("seed",), int),
    "FLOWCAST_BANDWIDTH": (("bandwidth",), int),
    "FLOWCAST_EPOCHS": (("epochs",), int),
    "FLOWCAST_LR": (("lr",), float),
}


def _apply_env_overrides(data: MutableMapping[str, Any], env: Mapping[str, str]) -> None:
    for env_key, (path, caster) in ENV_OVERRIDE_MAP.items():
        if env_key in env:
            _set_nested_value(data, path, caster(env[env_key]))


def _set_nested_value(target: MutableMapping[str, Any], path: Sequence[str], value: Any) -> None:
    cursor: MutableMapping[str, Any] = target
    *parents, last = path
    for key in parents:
        if key not in cursor or not isinstance(cursor[key], MutableMapping):
            cursor[key] = {}
        cursor = cursor[key]  # type: ignore[assignment]
    cursor[last] = value


def load_config(path: str | Path | None = None, *, env: Mapping[str, str] | None = None) -> ForecastConfig:
    """加载配置：优先显式路径，其次环境变量，最后回退默认 baseline。"""

    env_map = os.environ if env is None else env
    config_path = path or env_map.get(CONFIG_ENV_KEY)
    target_path = Path(config_path).expanduser() if config_path else _default_config_path()
    data = _load_yaml(target_path)
    _apply_env_overrides(data, env_map)

    # 相对数据路径以配置文件所在目录为基准
    for key in ("dataset_path", "mask_path", "adjacency_path"):
        value = data.get(key)
        if value and not Path(value).expanduser().is_absolute():
            data[key] = str((target_path.parent / value).resolve())

    return ForecastConfig.from_dict(data)
