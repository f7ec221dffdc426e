"""端到端梯度检查：对模型的每个参数张量做有限差分比对。"""

from __future__ import annotations

from typing import List, Mapping, Optional

import numpy as np

from flowcast.autodiff import Node, ScalarFn, Tape, finite_diff_check
from flowcast.core import ForecastConfig, GradCheckReport, get_logger
from flowcast.data import PreparedData, SegmentBatch
from flowcast.graph import AdjacencyTensor, adjacency_set
from flowcast.model import ModelParams, bind_adjacency, forward_nodes

logger = get_logger(__name__)

# 探测坐标的梯度下限（相对 |loss|），h=1e-6 时舍入误差约 1e-10·|loss|
MODEL_GRAD_FLOOR = 1e-5


def model_loss_fn(
    params: ModelParams,
    target_name: str,
    batch: SegmentBatch,
    adjacency: Mapping[str, AdjacencyTensor],
) -> ScalarFn:
    """把“单个参数张量 -> MSE 损失”包装成 finite_diff_check 需要的函数。"""

    def fn(tape: Tape, x: Node) -> Node:
        nodes = {
            name: x if name == target_name else tape.constant(value, name=name)
            for name, value in params.values.items()
        }
        adjacency_nodes = bind_adjacency(tape, adjacency, params.spec)
        prediction = forward_nodes(tape, batch, adjacency_nodes, nodes, params.spec)
        return tape.mse(prediction, batch.target)

    return fn


def unit_scaled(batch: SegmentBatch) -> SegmentBatch:
    """按 hourly 段的标准差整体缩放到单位量级。"""

    scale = float(np.std(batch.hourly)) or 1.0
    return SegmentBatch(
        hourly=batch.hourly / scale,
        daily=batch.daily / scale,
        weekly=batch.weekly / scale,
        target=batch.target / scale,
        t0=batch.t0,
    )


def model_gradcheck(
    params: ModelParams,
    data: PreparedData,
    cfg: ForecastConfig,
    *,
    h: float = 1e-6,
    probes: int = 20,
    tolerance: float = 1e-4,
    seed: int = 0,
    t0: Optional[int] = None,
    grad_floor: float = MODEL_GRAD_FLOOR,
) -> List[GradCheckReport]:
    """对每个参数张量做一次 finite_diff_check，探测坐标只取梯度不低于下限的分量。"""

    adjacency = adjacency_set(data.topology, cfg.branch_lengths())
    anchor = data.plan.anchors["train"].start if t0 is None else t0
    batch = unit_scaled(data.batch(anchor))
    reports = []
    for name in sorted(params.values):
        report = finite_diff_check(
            model_loss_fn(params, name, batch, adjacency),
            np.array(params.values[name]),
            h,
            probes,
            tolerance=tolerance,
            seed=seed,
            op_name=f"model.{name}",
            grad_floor=grad_floor,
        )
        reports.append(report)
    failed = [r.op_name for r in reports if not r.passed]
    if failed:
        logger.warning("model gradcheck failures: %s", failed)
    return reports
