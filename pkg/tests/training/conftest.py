from __future__ import annotations

import pytest

from flowcast.core import ForecastConfig
from flowcast.data import PreparedData, prepare_data
from flowcast.model import ModelParams, ModelSpec, init_params


@pytest.fixture
def quick_cfg(desk_cfg: ForecastConfig) -> ForecastConfig:
    return desk_cfg.with_updates(epochs=3, hidden_f=8, r=2)


@pytest.fixture
def quick_data(quick_cfg: ForecastConfig) -> PreparedData:
    return prepare_data(quick_cfg)


@pytest.fixture
def quick_params(quick_cfg: ForecastConfig, quick_data: PreparedData) -> ModelParams:
    spec = ModelSpec.from_config(quick_cfg, f_in=quick_data.dataset.F)
    return init_params(spec, seed=quick_cfg.seed)
