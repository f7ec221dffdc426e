"""后台批次生产者：单工作线程 + 有界队列，批次顺序只由 (seed, epoch) 决定。"""

from __future__ import annotations

import queue
import threading
from typing import Callable, Iterator, List, Sequence

import numpy as np

from flowcast.core import get_logger
from flowcast.core.errors import ContractError
from flowcast.data.types import SegmentBatch

logger = get_logger(__name__)

_DONE = object()


def epoch_order(anchors: Sequence[int], seed: int, epoch: int, batch_size: int) -> List[List[int]]:
    """固定种子下第 epoch 轮的锚点分组；与线程调度无关。"""

    if batch_size < 1:
        raise ContractError(f"batch_size 需 >= 1，实际 {batch_size}")
    rng = np.random.default_rng([seed, epoch])
    shuffled = [int(anchors[i]) for i in rng.permutation(len(anchors))]
    return [shuffled[i : i + batch_size] for i in range(0, len(shuffled), batch_size)]


class BatchProducer:
    """按 epoch 产出 List[SegmentBatch]；prefetch=0 时退化为同步生成。"""

    def __init__(
        self,
        anchors: Sequence[int],
        build: Callable[[int], SegmentBatch],
        *,
        batch_size: int,
        seed: int,
        prefetch: int = 2,
    ) -> None:
        if not anchors:
            raise ContractError("训练锚点为空")
        self._anchors = list(anchors)
        self._build = build
        self._batch_size = batch_size
        self._seed = seed
        self._prefetch = prefetch

    def order(self, epoch: int) -> List[List[int]]:
        return epoch_order(self._anchors, self._seed, epoch, self._batch_size)

    def epoch(self, epoch: int) -> Iterator[List[SegmentBatch]]:
        groups = self.order(epoch)
        if self._prefetch <= 0:
            for group in groups:
                yield [self._build(t0) for t0 in group]
            return
        yield from self._threaded(groups)

    def _threaded(self, groups: List[List[int]]) -> Iterator[List[SegmentBatch]]:
        buffer: "queue.Queue[object]" = queue.Queue(maxsize=self._prefetch)
        stop = threading.Event()

        def worker() -> None:
            try:
                for group in groups:
                    item = [self._build(t0) for t0 in group]
                    while not stop.is_set():
                        try:
                            buffer.put(item, timeout=0.1)
                            break
                        except queue.Full:
                            continue
                    if stop.is_set():
                        return
            except Exception as exc:  # 交给消费方重新抛出
                buffer.put(exc)
                return
            buffer.put(_DONE)

        thread = threading.Thread(target=worker, name="flowcast-batches", daemon=True)
        thread.start()
        try:
            while True:
                item = buffer.get()
                if item is _DONE:
                    break
                if isinstance(item, Exception):
                    raise item
                yield item  # type: ignore[misc]
        finally:
            stop.set()
            _drain(buffer)
            thread.join(timeout=5.0)


def _drain(buffer: "queue.Queue[object]") -> int:
    count = 0
    while True:
        try:
            buffer.get_nowait()
            count += 1
        except queue.Empty:
            return count
