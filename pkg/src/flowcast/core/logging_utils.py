"""轻量日志工具：日志统一写 stderr，stdout 留给 JSON 报告。"""

from __future__ import annotations

import logging
import sys
from typing import Optional

_STAGE_PREFIXES = (
    ("flowcast.tensor_core", "algebra"),
    ("flowcast.autodiff", "autodiff"),
    ("flowcast.graph", "graph"),
    ("flowcast.model", "model"),
    ("flowcast.data", "data"),
    ("flowcast.training", "training"),
    ("flowcast.eval_cli", "evaluation"),
)

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(stage)s | %(name)s | %(message)s"


def get_stage_name(logger_name: str) -> str:
    """根据 logger 名称映射到业务阶段。"""

    for prefix, stage in _STAGE_PREFIXES:
        if logger_name.startswith(prefix):
            return stage
    return "general"


class StageFilter(logging.Filter):
    """为每条日志补充 stage 字段，供格式串引用。"""

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "stage"):
            record.stage = get_stage_name(record.name)
        return True


def setup_logging(level: str = "INFO") -> logging.Handler:
    """设置 flowcast 根 logger，默认 INFO；重复调用只替换级别不叠加 handler。"""

    root = logging.getLogger("flowcast")
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in root.handlers:
        if getattr(handler, "_flowcast", False):
            return handler
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.addFilter(StageFilter())
    handler._flowcast = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.propagate = False
    return handler


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """获取模块专属 logger，抽出来便于后续接入 JSON/结构化日志。"""

    return logging.getLogger(name or "flowcast")
