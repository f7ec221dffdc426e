"""数据集装载与准备：读取 TNS1/CSV（或生成合成数据），切分并归一化。"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from flowcast.core import ForecastConfig, get_logger
from flowcast.core.errors import ConfigError, DataError
from flowcast.graph import GraphTopology, gaussian_kernel_affinity, load_adjacency_csv

from .preprocess import preprocess_dataset
from .segments import extract_segments, min_anchor
from .split import SplitPlan, plan_split
from .synthetic import generate_synthetic
from .tns1 import read_tns1
from .types import SegmentBatch, TrafficDataset

logger = get_logger(__name__)


def load_dataset(cfg: ForecastConfig) -> Tuple[TrafficDataset, GraphTopology]:
    """返回原始（未归一化）数据集与距离拓扑；未配置 dataset_path 时生成合成数据。"""

    if cfg.dataset_path is None:
        syn = cfg.synthetic
        return generate_synthetic(
            syn.num_nodes,
            syn.days,
            cfg.q,
            cfg.seed,
            noise=syn.noise,
            coupling=syn.coupling,
            weekly_amplitude=syn.weekly_amplitude,
            features=syn.features,
        )

    cube = read_tns1(cfg.dataset_path)
    if cube.ndim != 3:
        raise DataError(f"{cfg.dataset_path} 需为 T_total×N×F 三阶张量，实际 dims={cube.shape}")
    mask = np.isnan(cube)
    if cfg.mask_path is not None:
        extra = read_tns1(cfg.mask_path)
        if extra.shape != cube.shape:
            raise DataError(f"mask dims={extra.shape} 与数据 dims={cube.shape} 不一致")
        mask |= extra != 0
    if cfg.adjacency_path is None:
        raise ConfigError("配置了 dataset_path 时必须同时提供 adjacency_path")
    topology = load_adjacency_csv(cfg.adjacency_path, num_nodes=cfg.num_nodes or cube.shape[1])
    if topology.N != cube.shape[1]:
        raise DataError(f"拓扑节点数 N={topology.N} 与数据节点数 {cube.shape[1]} 不一致")
    dataset = TrafficDataset(
        cube=np.where(mask, 0.0, cube),
        q=cfg.q,
        mask=mask if mask.any() else None,
        meta={"source": str(cfg.dataset_path)},
    )
    logger.info("Loaded dataset %s dims=%s, missing=%d", cfg.dataset_path, cube.shape, int(mask.sum()))
    return dataset, topology


@dataclass(slots=True)
class PreparedData:
    """训练与评估共用的数据上下文：归一化数据、图、切分与锚点。"""

    cfg: ForecastConfig
    raw: TrafficDataset
    dataset: TrafficDataset
    topology: GraphTopology
    plan: SplitPlan
    min_t0: int

    def batch(self, t0: int) -> SegmentBatch:
        cfg = self.cfg
        return extract_segments(
            self.dataset, t0, cfg.T_p, cfg.T_h, cfg.T_d, cfg.T_w, f_out=cfg.f_out
        )

    def batches(self, partition: str) -> List[SegmentBatch]:
        return [self.batch(t0) for t0 in self.plan.anchors[partition]]

    def summary(self) -> Dict[str, object]:
        return {
            "dims": list(self.dataset.cube.shape),
            "q": self.dataset.q,
            "min_t0": self.min_t0,
            "split": self.plan.to_dict(),
        }


def prepare_data(cfg: ForecastConfig) -> PreparedData:
    raw, topology = load_dataset(cfg)
    if cfg.f_out > raw.F:
        raise ConfigError(f"f_out={cfg.f_out} 超过数据特征数 F={raw.F}")
    lowest = min_anchor(cfg.q, cfg.T_p, cfg.T_h, cfg.T_d, cfg.T_w)
    plan = plan_split(raw.T_total, cfg.split, lowest, cfg.T_p)
    dataset = preprocess_dataset(raw, plan.train)
    graph = gaussian_kernel_affinity(topology) if cfg.gaussian_kernel else topology
    logger.info(
        "Prepared data: dims=%s, anchors train=%d val=%d test=%d",
        raw.cube.shape,
        len(plan.anchors["train"]),
        len(plan.anchors["val"]),
        len(plan.anchors["test"]),
    )
    return PreparedData(
        cfg=cfg, raw=raw, dataset=dataset, topology=graph, plan=plan, min_t0=lowest
    )
