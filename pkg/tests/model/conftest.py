from __future__ import annotations

from typing import Callable, Dict

import numpy as np
import pytest

from flowcast.core import ForecastConfig
from flowcast.data import SegmentBatch
from flowcast.graph import AdjacencyTensor, adjacency_set, ring_topology
from flowcast.model import ModelSpec


@pytest.fixture
def desk_spec(desk_cfg: ForecastConfig) -> ModelSpec:
    return ModelSpec.from_config(desk_cfg, f_in=1)


@pytest.fixture
def desk_adjacency(desk_cfg: ForecastConfig) -> Dict[str, AdjacencyTensor]:
    topology = ring_topology(4, costs=[1.0, 0.6, 0.8, 1.4])
    return adjacency_set(topology, desk_cfg.branch_lengths())


@pytest.fixture
def make_batch(rng: np.random.Generator) -> Callable[..., SegmentBatch]:
    def build(n: int = 4, f: int = 1, T: int = 4) -> SegmentBatch:
        return SegmentBatch(
            hourly=rng.normal(size=(n, f, T)),
            daily=rng.normal(size=(n, f, T)),
            weekly=rng.normal(size=(n, f, T)),
            target=rng.normal(size=(n, 1, T)),
            t0=56,
        )

    return build
