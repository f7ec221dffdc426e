"""有限差分梯度校验：把解析梯度与中心差分逐坐标比较。"""

from __future__ import annotations

from typing import Callable, List

import numpy as np
from numpy.typing import NDArray

from flowcast.core import GradCheckReport, get_logger
from flowcast.core.errors import ContractError
from flowcast.tensor_core import banded_m

from .tape import Node, Tape, backward

logger = get_logger(__name__)

ScalarFn = Callable[[Tape, Node], Node]
"""在给定 tape 上把输入节点映射为标量 loss 节点。"""


def _evaluate(fn: ScalarFn, x: NDArray[np.float64]) -> float:
    tape = Tape()
    return float(fn(tape, tape.constant(x, name="x")).value)


def _probe_candidates(
    analytic: NDArray[np.float64], threshold: float, probes: int
) -> NDArray[np.int64]:
    magnitude = np.abs(analytic).ravel()
    eligible = np.flatnonzero(magnitude >= threshold)
    if eligible.size:
        return eligible
    logger.debug("No gradient component above %.3e, probing the largest ones", threshold)
    return np.argsort(magnitude, kind="stable")[-probes:]


def finite_diff_check(
    fn: ScalarFn,
    x: NDArray[np.float64],
    h: float = 1e-6,
    probes: int = 20,
    *,
    tolerance: float = 1e-5,
    seed: int = 0,
    op_name: str = "f",
    grad_floor: float = 0.0,
) -> GradCheckReport:
    """在 probes 个随机坐标上比较解析梯度与 (f(x+h·e) - f(x-h·e)) / 2h。

    相对误差分母取 max(1e-12, |analytic| + |numeric|)；失败不抛异常，由报告承载。
    grad_floor > 0 时只在 |analytic| >= grad_floor·|f(x)| 的坐标中抽样：中心差分的舍入误差
    约为 eps·|f|/h，低于该量级的梯度分量无法可靠比对。没有坐标达标时退回梯度最大的
    probes 个坐标。
    """

    if h <= 0:
        raise ContractError(f"步长 h 需为正数，实际 {h}")
    if probes < 1:
        raise ContractError(f"probes 需 >= 1，实际 {probes}")
    if grad_floor < 0:
        raise ContractError(f"grad_floor 不能为负，实际 {grad_floor}")

    base = np.array(x, dtype=np.float64)
    tape = Tape()
    leaf = tape.parameter(base, name="x")
    loss = fn(tape, leaf)
    analytic = backward(tape, loss)["x"]

    rng = np.random.default_rng(seed)
    if grad_floor > 0:
        candidates = _probe_candidates(analytic, grad_floor * abs(float(loss.value)), probes)
        coords = rng.choice(candidates, size=probes, replace=probes > candidates.size)
    else:
        coords = rng.choice(base.size, size=probes, replace=probes > base.size)
    worst = 0.0
    for flat in coords:
        index = np.unravel_index(int(flat), base.shape)
        plus = base.copy()
        minus = base.copy()
        plus[index] += h
        minus[index] -= h
        numeric = (_evaluate(fn, plus) - _evaluate(fn, minus)) / (2.0 * h)
        exact = float(analytic[index])
        rel = abs(exact - numeric) / max(1e-12, abs(exact) + abs(numeric))
        worst = max(worst, rel)

    report = GradCheckReport(
        op_name=op_name,
        max_relative_error=worst,
        tolerance=tolerance,
        probe_count=int(probes),
    )
    logger.debug("gradcheck %s: max_rel=%.3e tol=%.0e", op_name, worst, tolerance)
    return report


def op_gradcheck_suite(
    *, seed: int = 0, h: float = 1e-6, probes: int = 20, tolerance: float = 1e-5
) -> List[GradCheckReport]:
    """对每个可微算子跑一次梯度检查；标量化统一用固定随机权重的内积。"""

    rng = np.random.default_rng(seed)
    mixing = banded_m(4, 2)
    other = rng.normal(size=(3, 2, 4))
    partner = rng.normal(size=(2, 3, 4))
    projection = rng.normal(size=(4, 2))
    target = rng.normal(size=(3, 2, 4))

    def weighted(tape: Tape, node: Node, salt: int) -> Node:
        weights = np.random.default_rng(seed + salt).normal(size=node.shape)
        return tape.sum(tape.hadamard(node, tape.constant(weights)))

    cases: List[tuple[str, ScalarFn, NDArray[np.float64]]] = [
        ("m_transform", lambda t, x: weighted(t, t.m_transform(x, mixing), 1), other),
        (
            "m_transform_inverse",
            lambda t, x: weighted(t, t.m_transform(x, mixing, inverse=True), 2),
            other,
        ),
        (
            "facewise_product.left",
            lambda t, x: weighted(t, t.facewise(x, t.constant(partner)), 3),
            other,
        ),
        (
            "facewise_product.right",
            lambda t, x: weighted(t, t.facewise(t.constant(other), x), 4),
            partner,
        ),
        ("add", lambda t, x: weighted(t, t.add(x, t.constant(target)), 5), other),
        ("hadamard", lambda t, x: weighted(t, t.hadamard(x, t.constant(target)), 6), other),
        ("scalar_scale", lambda t, x: weighted(t, t.scale(x, -1.7), 7), other),
        ("sigmoid", lambda t, x: weighted(t, t.sigmoid(x), 8), other),
        ("relu", lambda t, x: weighted(t, t.relu(x), 9), other),
        ("global_mean", lambda t, x: weighted(t, t.mean(x, axes=(0, 2)), 10), other),
        (
            "broadcast",
            lambda t, x: weighted(t, t.broadcast(t.mean(x, axes=(0, 2)), (3, 2, 4)), 11),
            other,
        ),
        (
            "temporal_projection.x",
            lambda t, x: weighted(t, t.temporal_project(x, t.constant(projection)), 12),
            other,
        ),
        (
            "temporal_projection.P",
            lambda t, p: weighted(t, t.temporal_project(t.constant(other), p), 13),
            projection,
        ),
        ("mse_loss", lambda t, x: t.mse(x, target), other),
    ]
    reports = [
        finite_diff_check(fn, x, h, probes, tolerance=tolerance, seed=seed, op_name=name)
        for name, fn, x in cases
    ]
    failed = [r.op_name for r in reports if not r.passed]
    if failed:
        logger.warning("gradcheck failures: %s", failed)
    return reports
