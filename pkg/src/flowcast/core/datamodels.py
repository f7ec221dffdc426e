"""核心报告结构定义：梯度检查、训练、指标与带宽扫描，保持 JSON 友好。"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from .errors import ContractError


@dataclass(slots=True)
class GradCheckReport:
    """有限差分梯度检查结果；pass 由误差与容差直接推出。"""

    op_name: str
    max_relative_error: float
    tolerance: float
    probe_count: int

    @property
    def passed(self) -> bool:
        return self.max_relative_error < self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["pass"] = self.passed
        return payload


@dataclass(slots=True)
class MetricReport:
    """单个预测步（scope=step）或整窗口平均（scope=window）的 MAE/RMSE。"""

    horizon_steps: int
    mae: float
    rmse: float
    n: int
    scope: str = "step"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ContractError(f"MetricReport 需要 n >= 1，实际 {self.n}")
        if self.mae < 0 or not math.isfinite(self.mae) or not math.isfinite(self.rmse):
            raise ContractError(f"指标非法: mae={self.mae}, rmse={self.rmse}")
        # RMS 不小于绝对误差均值；仅容忍舍入误差
        if self.rmse < self.mae * (1.0 - 1e-12) - 1e-12:
            raise ContractError(f"rmse={self.rmse} < mae={self.mae}，违反 RMS-均值不等式")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetricReport":
        return cls(
            horizon_steps=int(data["horizon_steps"]),
            mae=float(data["mae"]),
            rmse=float(data["rmse"]),
            n=int(data["n"]),
            scope=str(data.get("scope", "step")),
        )


@dataclass(slots=True)
class SweepEntry:
    b: int
    mae: float
    rmse: float


@dataclass(slots=True)
class SweepReport:
    """带宽扫描表：每个 b 一行测试集 MAE/RMSE。"""

    entries: List[SweepEntry]
    config_hash: str = ""

    @property
    def best_b_mae(self) -> int:
        return min(self.entries, key=lambda e: (e.mae, e.b)).b

    @property
    def best_b_rmse(self) -> int:
        return min(self.entries, key=lambda e: (e.rmse, e.b)).b

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entries": [asdict(entry) for entry in self.entries],
            "best_b": {"mae": self.best_b_mae, "rmse": self.best_b_rmse},
            "config_hash": self.config_hash,
        }


@dataclass(slots=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass(slots=True)
class TrainReport:
    """逐 epoch 的训练损失（MSE，归一化尺度）与验证 MAE（反归一化尺度）。"""

    epochs: List[EpochRecord] = field(default_factory=list)
    wall_time_s: float = 0.0
    stopped_early: bool = False
    initial_train_loss: Optional[float] = None

    @property
    def best_epoch(self) -> Optional[int]:
        if not self.epochs:
            return None
        return min(self.epochs, key=lambda rec: (rec.val_loss, rec.epoch)).epoch

    @property
    def train_losses(self) -> List[float]:
        return [rec.train_loss for rec in self.epochs]

    @property
    def val_losses(self) -> List[float]:
        return [rec.val_loss for rec in self.epochs]

    def to_jsonl(self, *, config_hash: str = "") -> str:
        """每个 epoch 一行 JSON，附带 best_epoch 与配置摘要。"""

        best = self.best_epoch
        lines = [
            json.dumps({**asdict(rec), "best_epoch": best, "config_hash": config_hash})
            for rec in self.epochs
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epochs": [asdict(rec) for rec in self.epochs],
            "best_epoch": self.best_epoch,
            "wall_time_s": self.wall_time_s,
            "stopped_early": self.stopped_early,
            "initial_train_loss": self.initial_train_loss,
        }
