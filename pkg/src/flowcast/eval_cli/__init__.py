"""评估与命令行：指标、带宽扫描、梯度检查与 CLI 入口。"""

from .cli import build_parser, cli_main, main
from .gradcheck import model_gradcheck
from .metrics import EvaluationReport, evaluate_model, horizon_reports, mae, metric_report, rmse
from .sweep import parse_range, sweep_bandwidth

__all__ = [
    "EvaluationReport",
    "build_parser",
    "cli_main",
    "evaluate_model",
    "horizon_reports",
    "mae",
    "main",
    "metric_report",
    "model_gradcheck",
    "parse_range",
    "rmse",
    "sweep_bandwidth",
]
