"""命令行入口：train / eval / gradcheck / synth / sweep-bandwidth / convert-check。

报告以单个 JSON 文档写到 stdout，日志写到 stderr。
退出码：0 成功，1 运行失败或检查未通过，2 用法错误。
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

from flowcast.autodiff import op_gradcheck_suite
from flowcast.core import (
    ForecastConfig,
    config_hash,
    get_logger,
    load_config,
    setup_logging,
)
from flowcast.core.errors import FlowcastError
from flowcast.core.paths import checkpoints_dir, reports_dir, synthetic_dir
from flowcast.data import generate_synthetic, inspect_tns1, prepare_data, write_tns1
from flowcast.graph import write_adjacency_csv
from flowcast.model import ModelSpec, init_params, load_checkpoint, save_checkpoint
from flowcast.training import train

from .gradcheck import model_gradcheck
from .metrics import evaluate_model
from .sweep import parse_range, sweep_bandwidth

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _emit(payload: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n")
    sys.stdout.flush()


def _load(args: argparse.Namespace) -> ForecastConfig:
    cfg = load_config(args.config)
    updates: Dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        updates["workers"] = args.workers
    return cfg.with_updates(**updates) if updates else cfg


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _load(args)
    digest = config_hash(cfg)
    data = prepare_data(cfg)
    spec = ModelSpec.from_config(cfg, data.dataset.F)
    params, report = train(init_params(spec, cfg.seed), data, cfg)

    out_dir = Path(args.out) if args.out else checkpoints_dir() / digest
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = save_checkpoint(
        out_dir / "model.ckpt", params, config_hash=digest, config=cfg.to_raw_dict()
    )
    report_path = out_dir / "train_report.jsonl"
    report_path.write_text(report.to_jsonl(config_hash=digest), encoding="utf-8")
    _emit(
        {
            "checkpoint": str(checkpoint),
            "report": str(report_path),
            "best_epoch": report.best_epoch,
            "initial_train_loss": report.initial_train_loss,
            "final_train_loss": report.train_losses[-1] if report.epochs else None,
            "wall_time_s": report.wall_time_s,
            "config_hash": digest,
        }
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load(args)
    digest = config_hash(cfg)
    data = prepare_data(cfg)
    spec = ModelSpec.from_config(cfg, data.dataset.F)
    checkpoint = load_checkpoint(args.checkpoint)
    if checkpoint.config_hash and checkpoint.config_hash != digest:
        logger.warning(
            "Checkpoint config hash %s differs from current config %s",
            checkpoint.config_hash,
            digest,
        )
    params = checkpoint.to_params(spec)
    report = evaluate_model(params, data, cfg, config_hash=digest)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    reports = op_gradcheck_suite(seed=args.seed or 0)
    digest = ""
    if args.config:
        cfg = _load(args)
        digest = config_hash(cfg)
        data = prepare_data(cfg)
        params = init_params(ModelSpec.from_config(cfg, data.dataset.F), cfg.seed)
        reports.extend(model_gradcheck(params, data, cfg, seed=cfg.seed))
    passed = all(report.passed for report in reports)
    _emit(
        {
            "reports": [report.to_dict() for report in reports],
            "pass": passed,
            "config_hash": digest,
        }
    )
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _load(args)
    syn = cfg.synthetic
    dataset, topology = generate_synthetic(
        syn.num_nodes,
        syn.days,
        cfg.q,
        cfg.seed,
        noise=syn.noise,
        coupling=syn.coupling,
        weekly_amplitude=syn.weekly_amplitude,
        features=syn.features,
    )
    out_dir = Path(args.out) if args.out else synthetic_dir() / f"seed{cfg.seed}"
    cube_path = write_tns1(out_dir / "data.tns1", dataset.cube)
    csv_path = write_adjacency_csv(topology, out_dir / "adjacency.csv")
    _emit(
        {
            "data": str(cube_path),
            "adjacency": str(csv_path),
            "dims": list(dataset.cube.shape),
            "seed": cfg.seed,
            "config_hash": config_hash(cfg),
        }
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load(args)
    values = parse_range(args.range)
    report = sweep_bandwidth(cfg, values, workers=cfg.workers)
    payload = report.to_dict()
    if args.out:
        target = Path(args.out)
    else:
        target = reports_dir() / f"sweep_{report.config_hash}.json"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    _emit(payload)
    return EXIT_OK


def cmd_convert_check(args: argparse.Namespace) -> int:
    header = inspect_tns1(args.tns)
    _emit({"path": str(args.tns), "valid": True, **header.to_dict()})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowcast", description="多分段张量图卷积交通流预测工具")
    parser.add_argument("--log-level", default="INFO", help="日志级别（写到 stderr）")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(
        name: str, handler: Callable[[argparse.Namespace], int], help_text: str
    ) -> argparse.ArgumentParser:
        command = sub.add_parser(name, help=help_text)
        command.set_defaults(handler=handler)
        return command

    train_cmd = add("train", cmd_train, "训练模型并保存检查点与 JSONL 报告")
    train_cmd.add_argument("--config")
    train_cmd.add_argument("--out", help="输出目录，默认 workspace/checkpoints/<config_hash>")
    train_cmd.add_argument("--seed", type=int)

    eval_cmd = add("eval", cmd_eval, "在测试集上评估检查点")
    eval_cmd.add_argument("--config")
    eval_cmd.add_argument("--checkpoint", required=True)
    eval_cmd.add_argument("--workers", type=int)
    eval_cmd.add_argument("--seed", type=int)

    grad_cmd = add("gradcheck", cmd_gradcheck, "有限差分梯度检查")
    grad_cmd.add_argument("--config", help="提供时额外检查整个模型的梯度")
    grad_cmd.add_argument("--seed", type=int)

    synth_cmd = add("synth", cmd_synth, "生成合成数据（TNS1 + CSV）")
    synth_cmd.add_argument("--config")
    synth_cmd.add_argument("--out")
    synth_cmd.add_argument("--seed", type=int)

    sweep_cmd = add("sweep-bandwidth", cmd_sweep, "带宽扫描")
    sweep_cmd.add_argument("--config")
    sweep_cmd.add_argument("--range", required=True, help='例如 "1,2,4" 或 "1-4"')
    sweep_cmd.add_argument("--out")
    sweep_cmd.add_argument("--workers", type=int)
    sweep_cmd.add_argument("--seed", type=int)

    check_cmd = add("convert-check", cmd_convert_check, "校验 TNS1 容器头部")
    check_cmd.add_argument("--tns", required=True)
    return parser


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE

    setup_logging(args.log_level.upper())
    try:
        return int(args.handler(args))
    except (FlowcastError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
