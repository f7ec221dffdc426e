from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from flowcast.core import ConfigError, DataError, ForecastConfig
from flowcast.data import load_dataset, prepare_data
from flowcast.data.tns1 import write_tns1
from flowcast.graph import load_adjacency_csv, ring_topology, write_adjacency_csv


def test_prepare_desk_data(desk_cfg: ForecastConfig) -> None:
    data = prepare_data(desk_cfg)
    assert data.dataset.cube.shape == (120, 4, 1)
    assert data.min_t0 == 56
    assert data.plan.anchors["train"].to_list() == [56, 68]
    np.testing.assert_allclose(data.dataset.cube[:72].mean(axis=(0, 1)), 0.0, atol=1e-10)
    np.testing.assert_allclose(data.dataset.cube + data.dataset.mean, data.raw.cube, atol=1e-10)
    assert data.topology.unit == "affinity"
    assert len(data.batches("test")) == 21
    summary = data.summary()
    assert summary["dims"] == [120, 4, 1]
    assert summary["split"]["test"]["anchors"] == [96, 116]


def test_gaussian_kernel_can_be_disabled(desk_cfg: ForecastConfig) -> None:
    data = prepare_data(desk_cfg.with_updates(gaussian_kernel=False))
    assert data.topology.unit == "distance"


def test_batch_target_uses_normalized_values(desk_cfg: ForecastConfig) -> None:
    data = prepare_data(desk_cfg)
    batch = data.batch(60)
    np.testing.assert_array_equal(batch.target[:, 0, :], data.dataset.cube[60:64, :, 0].T)


def test_load_from_files_with_missing_values(tmp_path: Path, desk_cfg: ForecastConfig) -> None:
    rng = np.random.default_rng(0)
    cube = rng.uniform(10.0, 20.0, size=(120, 3, 2))
    cube[5, 1, 0] = np.nan
    mask = np.zeros_like(cube)
    mask[7, 2, 1] = 1.0
    write_tns1(tmp_path / "data.tns1", cube)
    write_tns1(tmp_path / "mask.tns1", mask, dtype="f32")
    write_adjacency_csv(ring_topology(3, costs=[1.0, 2.0, 3.0]), tmp_path / "adjacency.csv")

    cfg = desk_cfg.with_updates(
        dataset_path=str(tmp_path / "data.tns1"),
        mask_path=str(tmp_path / "mask.tns1"),
        adjacency_path=str(tmp_path / "adjacency.csv"),
    )
    dataset, topology = load_dataset(cfg)
    assert topology.N == 3
    assert dataset.mask is not None
    assert dataset.mask[5, 1, 0] and dataset.mask[7, 2, 1]
    assert int(dataset.mask.sum()) == 2

    data = prepare_data(cfg)
    assert np.all(np.isfinite(data.dataset.cube))
    expected = 0.5 * (cube[4, 1, 0] + cube[6, 1, 0])
    assert data.dataset.cube[5, 1, 0] + data.dataset.mean[0] == pytest.approx(expected, rel=1e-12)


def test_file_config_requires_adjacency(tmp_path: Path, desk_cfg: ForecastConfig) -> None:
    write_tns1(tmp_path / "data.tns1", np.ones((120, 3, 1)))
    with pytest.raises(ConfigError):
        load_dataset(desk_cfg.with_updates(dataset_path=str(tmp_path / "data.tns1")))


def test_node_count_mismatch(tmp_path: Path, desk_cfg: ForecastConfig) -> None:
    write_tns1(tmp_path / "data.tns1", np.ones((120, 3, 1)))
    write_adjacency_csv(ring_topology(5), tmp_path / "adjacency.csv")
    assert load_adjacency_csv(tmp_path / "adjacency.csv").N == 5
    cfg = desk_cfg.with_updates(
        dataset_path=str(tmp_path / "data.tns1"), adjacency_path=str(tmp_path / "adjacency.csv")
    )
    with pytest.raises(DataError):
        load_dataset(cfg)


def test_too_few_days(desk_cfg: ForecastConfig) -> None:
    with pytest.raises(ConfigError):
        prepare_data(desk_cfg.with_updates(T_w=8))
