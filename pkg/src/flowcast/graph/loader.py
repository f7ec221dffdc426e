"""PEMS 风格距离文件（CSV）读写，表头固定为 from,to,cost。"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Any, List, Optional, Sequence

import pandas as pd

from flowcast.core import get_logger
from flowcast.core.errors import DataError, ParseError

from .types import Edge, GraphTopology

logger = get_logger(__name__)

CSV_HEADER = ["from", "to", "cost"]

_TOKENIZER_LINE = re.compile(r"line (\d+)")


def _is_blank(row: Sequence[Any]) -> bool:
    return all(pd.isna(value) or not str(value).strip() for value in row)


def load_adjacency_csv(path: str | Path, *, num_nodes: Optional[int] = None) -> GraphTopology:
    """解析距离 CSV；N 默认取 1 + 最大节点 id，可由 num_nodes 覆盖。"""

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"邻接文件不存在: {path}")
    # 表头也按数据行读入，保留空行，行号 = 行下标 + 1
    try:
        frame = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as exc:
        raise ParseError("文件为空，缺少表头 from,to,cost", line=1) from exc
    except pd.errors.ParserError as exc:
        match = _TOKENIZER_LINE.search(str(exc))
        line = int(match.group(1)) if match else 1
        raise ParseError(f"CSV 结构错误: {exc}", line=line) from exc

    rows = list(frame.itertuples(index=False, name=None))
    header = [str(col).strip() for col in rows[0]] if rows else []
    if header != CSV_HEADER:
        raise ParseError(f"表头需为 {','.join(CSV_HEADER)}，实际 {','.join(header)}", line=1)

    edges: List[Edge] = []
    for offset, row in enumerate(rows[1:]):
        line = offset + 2
        if _is_blank(row):
            continue
        raw_from, raw_to, raw_cost = (
            "" if pd.isna(value) else str(value).strip() for value in row
        )
        try:
            source, target = int(raw_from), int(raw_to)
            cost = float(raw_cost)
        except ValueError as exc:
            raise ParseError(f"无法解析行 {raw_from},{raw_to},{raw_cost}", line=line) from exc
        if not math.isfinite(cost):
            raise DataError(f"line {line}: cost 非有限值 {raw_cost}")
        if cost < 0:
            raise DataError(f"line {line}: cost 不能为负 ({cost})")
        if source < 0 or target < 0:
            raise DataError(f"line {line}: 节点 id 不能为负")
        edges.append(Edge(source=source, target=target, weight=cost))

    if num_nodes is None:
        if not edges:
            raise DataError(f"{path} 没有任何边，需要在配置中提供 num_nodes")
        num_nodes = 1 + max(max(edge.source, edge.target) for edge in edges)
    logger.info("Loaded adjacency %s: N=%d, edges=%d", path.name, num_nodes, len(edges))
    return GraphTopology(N=num_nodes, edges=tuple(edges), unit="distance")


def write_adjacency_csv(topology: GraphTopology, path: str | Path) -> Path:
    """按固定表头写出边表，供 synth 命令与转换脚本复用。"""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [(edge.source, edge.target, edge.weight) for edge in topology.edges],
        columns=CSV_HEADER,
    )
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
    return path
