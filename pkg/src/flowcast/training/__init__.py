"""训练模块：损失、优化器、批次生产者、训练循环与历史平均基线。"""

from .baseline import historical_average_baseline, phase_means
from .loss import batch_mse_node, mse_loss
from .optim import SGD, Adam, Optimizer, build_optimizer, clip_global_norm, global_norm
from .producer import BatchProducer, epoch_order
from .settings import TrainConfig
from .trainer import evaluate_mae, evaluate_mse, train

__all__ = [
    "Adam",
    "BatchProducer",
    "Optimizer",
    "SGD",
    "TrainConfig",
    "batch_mse_node",
    "build_optimizer",
    "clip_global_norm",
    "epoch_order",
    "evaluate_mae",
    "evaluate_mse",
    "global_norm",
    "historical_average_baseline",
    "mse_loss",
    "phase_means",
    "train",
]
