"""优化器与梯度裁剪，均以 {参数名: ndarray} 字典为操作对象。"""

from __future__ import annotations

import math
from typing import Dict, Mapping, Union

import numpy as np
from numpy.typing import NDArray

from flowcast.core.errors import ConfigError, NumericalError

from .settings import TrainConfig

Array = NDArray[np.float64]


def global_norm(grads: Mapping[str, Array]) -> float:
    return math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))


def clip_global_norm(grads: Mapping[str, Array], max_norm: float) -> tuple[Dict[str, Array], float]:
    """按全局范数裁剪，返回新的梯度字典与裁剪前的范数；不修改输入。"""

    if max_norm <= 0:
        raise ConfigError(f"max_norm 需为正数，实际 {max_norm}")
    norm = global_norm(grads)
    if not math.isfinite(norm):
        raise NumericalError(f"梯度全局范数非有限: {norm}")
    if norm <= max_norm:
        return {name: g.copy() for name, g in grads.items()}, norm
    factor = max_norm / norm
    return {name: g * factor for name, g in grads.items()}, norm


class SGD:
    """θ ← θ − lr·g。"""

    def __init__(self, lr: float) -> None:
        if lr < 0:
            raise ConfigError(f"lr 不能为负: {lr}")
        self.lr = lr

    def step(self, params: Dict[str, Array], grads: Mapping[str, Array]) -> None:
        if self.lr == 0.0:
            return
        for name, grad in grads.items():
            params[name] -= self.lr * grad


class Adam:
    """带偏差校正的 Adam；状态按参数名保存。"""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        if lr < 0:
            raise ConfigError(f"lr 不能为负: {lr}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: Dict[str, Array] = {}
        self._v: Dict[str, Array] = {}

    def step(self, params: Dict[str, Array], grads: Mapping[str, Array]) -> None:
        self.t += 1
        if self.lr == 0.0:
            return
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name, grad in grads.items():
            m = self._m.get(name, np.zeros_like(grad))
            v = self._v.get(name, np.zeros_like(grad))
            m = self.beta1 * m + (1.0 - self.beta1) * grad
            v = self.beta2 * v + (1.0 - self.beta2) * grad * grad
            self._m[name] = m
            self._v[name] = v
            params[name] -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


Optimizer = Union[SGD, Adam]


def build_optimizer(cfg: TrainConfig) -> Optimizer:
    if cfg.optimizer == "sgd":
        return SGD(cfg.lr)
    return Adam(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
