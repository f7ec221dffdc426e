from __future__ import annotations

import pytest

from flowcast.core import ContractError
from flowcast.data import PreparedData
from flowcast.training import BatchProducer, epoch_order


def test_epoch_order_is_deterministic() -> None:
    anchors = list(range(56, 69))
    first = epoch_order(anchors, seed=7, epoch=1, batch_size=4)
    assert first == epoch_order(anchors, seed=7, epoch=1, batch_size=4)
    assert first != epoch_order(anchors, seed=7, epoch=2, batch_size=4)
    assert [len(group) for group in first] == [4, 4, 4, 1]
    assert sorted(t0 for group in first for t0 in group) == anchors


def test_threaded_producer_matches_synchronous(quick_data: PreparedData) -> None:
    anchors = quick_data.plan.anchor_list("train")
    kwargs = dict(batch_size=3, seed=11)
    threaded = BatchProducer(anchors, quick_data.batch, prefetch=1, **kwargs)
    sync = BatchProducer(anchors, quick_data.batch, prefetch=0, **kwargs)
    for epoch in (1, 2):
        a = [[b.t0 for b in group] for group in threaded.epoch(epoch)]
        b = [[b.t0 for b in group] for group in sync.epoch(epoch)]
        assert a == b == threaded.order(epoch)


def test_early_exit_does_not_hang(quick_data: PreparedData) -> None:
    anchors = quick_data.plan.anchor_list("train")
    producer = BatchProducer(anchors, quick_data.batch, batch_size=1, seed=0, prefetch=1)
    iterator = producer.epoch(1)
    next(iterator)
    iterator.close()


def test_worker_errors_reach_consumer() -> None:
    def build(t0: int):
        raise ValueError(f"bad anchor {t0}")

    producer = BatchProducer([1, 2], build, batch_size=1, seed=0, prefetch=2)
    with pytest.raises(ValueError, match="bad anchor"):
        list(producer.epoch(1))


def test_empty_anchors() -> None:
    with pytest.raises(ContractError):
        BatchProducer([], lambda t0: None, batch_size=1, seed=0)
    with pytest.raises(ContractError):
        epoch_order([1], seed=0, epoch=1, batch_size=0)
