"""带宽扫描：每个 b 用相同种子与超参数训练一次，记录测试集 MAE/RMSE。"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional

from flowcast.core import ForecastConfig, SweepEntry, SweepReport, config_hash, get_logger
from flowcast.core.errors import ConfigError
from flowcast.data import PreparedData, prepare_data
from flowcast.model import ModelSpec, init_params
from flowcast.training import train

from .metrics import evaluate_model

logger = get_logger(__name__)


def parse_range(text: str) -> List[int]:
    """解析 "1,2,4"、"1-4" 或二者混合的带宽列表，保持给定顺序。"""

    values: List[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            if "-" in chunk:
                low, high = (int(part) for part in chunk.split("-", 1))
                if high < low:
                    raise ConfigError(f"区间 {chunk} 上界小于下界")
                values.extend(range(low, high + 1))
            else:
                values.append(int(chunk))
        except ValueError as exc:
            raise ConfigError(f"无法解析带宽列表 {text!r}") from exc
    if not values:
        raise ConfigError("带宽列表为空")
    return values


def _run_one(cfg: ForecastConfig, data: PreparedData, b: int) -> SweepEntry:
    local = cfg.with_updates(bandwidth=b)
    spec = ModelSpec.from_config(local, data.dataset.F)
    params, _ = train(init_params(spec, local.seed), data, local)
    window = evaluate_model(params, data, local, workers=1).window
    logger.info("Sweep entry b=%d: MAE=%.4f RMSE=%.4f", b, window.mae, window.rmse)
    return SweepEntry(b=b, mae=window.mae, rmse=window.rmse)


def sweep_bandwidth(
    cfg: ForecastConfig,
    b_values: Iterable[int],
    *,
    data: Optional[PreparedData] = None,
    workers: int = 1,
) -> SweepReport:
    """workers > 1 时并发训练；每次运行互相独立，结果与顺序执行一致。"""

    values = list(b_values)
    if not values:
        raise ConfigError("带宽列表为空")
    duplicates = sorted({b for b in values if values.count(b) > 1})
    if duplicates:
        raise ConfigError(f"带宽列表中存在重复值: {duplicates}")
    limit = min(cfg.T_h, cfg.T_d, cfg.T_w)
    outside = [b for b in values if not 1 <= b <= limit]
    if outside:
        raise ConfigError(f"带宽 {outside} 超出区间 [1, {limit}]")

    data = data or prepare_data(cfg)
    logger.info("Starting bandwidth sweep. b=%s, workers=%d", values, workers)
    if workers <= 1 or len(values) == 1:
        entries = [_run_one(cfg, data, b) for b in values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(lambda b: _run_one(cfg, data, b), values))
    return SweepReport(entries=entries, config_hash=config_hash(cfg))
