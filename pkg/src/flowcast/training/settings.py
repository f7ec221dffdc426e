"""训练超参数视图：从 ForecastConfig 中抽出训练循环关心的字段。"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict, Literal, Optional

from flowcast.core import ForecastConfig
from flowcast.core.errors import ConfigError


@dataclass(frozen=True, slots=True)
class TrainConfig:
    lr: float
    epochs: int
    batch_size: int
    seed: int
    patience: Optional[int] = None
    optimizer: Literal["sgd", "adam"] = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    grad_clip: Optional[float] = 5.0
    prefetch: int = 2

    def __post_init__(self) -> None:
        # lr=0 保留给“优化器空转”检查
        if self.lr < 0:
            raise ConfigError(f"lr 不能为负: {self.lr}")
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigError(f"epochs={self.epochs}, batch_size={self.batch_size} 非法")
        if self.patience is not None and not 1 <= self.patience <= max(self.epochs, 1):
            raise ConfigError(f"patience={self.patience} 需位于 [1, epochs={self.epochs}]")
        if self.optimizer not in ("sgd", "adam"):
            raise ConfigError(f"未知优化器 {self.optimizer}")

    @classmethod
    def from_config(cls, cfg: ForecastConfig) -> "TrainConfig":
        return cls(
            lr=cfg.lr,
            epochs=cfg.epochs,
            batch_size=cfg.batch_size,
            seed=cfg.seed,
            patience=cfg.patience,
            optimizer=cfg.optimizer,
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            eps=cfg.eps,
            grad_clip=cfg.grad_clip,
            prefetch=cfg.prefetch,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
