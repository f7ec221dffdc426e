"""核心模块入口，聚合配置、报告结构、异常与日志工具供各模块复用。"""

from .config import SEGMENT_KINDS, ForecastConfig, SyntheticConfig, config_hash, load_config
from .datamodels import (
    EpochRecord,
    GradCheckReport,
    MetricReport,
    SweepEntry,
    SweepReport,
    TrainReport,
)
from .errors import (
    ConfigError,
    ContractError,
    DataError,
    FlowcastError,
    FormatError,
    NumericalError,
    ParameterError,
    ParseError,
    RangeError,
    ShapeError,
    TrainingAborted,
)
from .logging_utils import get_logger, get_stage_name, setup_logging
from .paths import resolve_workspace_root

__all__ = [
    "SEGMENT_KINDS",
    "ForecastConfig",
    "SyntheticConfig",
    "config_hash",
    "load_config",
    "EpochRecord",
    "GradCheckReport",
    "MetricReport",
    "SweepEntry",
    "SweepReport",
    "TrainReport",
    "ConfigError",
    "ContractError",
    "DataError",
    "FlowcastError",
    "FormatError",
    "NumericalError",
    "ParameterError",
    "ParseError",
    "RangeError",
    "ShapeError",
    "TrainingAborted",
    "get_logger",
    "get_stage_name",
    "setup_logging",
    "resolve_workspace_root",
]
