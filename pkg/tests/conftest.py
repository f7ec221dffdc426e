from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from flowcast.core import ForecastConfig, load_config

REPO_ROOT = Path(__file__).resolve().parents[1]
DESK_CONFIG = REPO_ROOT / "configs" / "desk.yaml"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def desk_cfg() -> ForecastConfig:
    return load_config(DESK_CONFIG, env={})


@pytest.fixture
def workspace(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    monkeypatch.setenv("FLOWCAST_WORKSPACE_ROOT", str(tmp_path / "workspace"))
    return tmp_path / "workspace"
