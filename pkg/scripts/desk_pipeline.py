#!/usr/bin/env python3
"""
Desk-scale end-to-end pipeline for flowcast.

Runs the CLI in-process: synth -> train -> eval -> gradcheck on configs/desk.yaml,
then checks the learning-signal thresholds and writes DESK_REPORT.md under the
workspace reports directory.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
from pathlib import Path
import time

from flowcast.core.paths import reports_dir, resolve_workspace_root
from flowcast.eval_cli import cli_main


def log(message: str) -> None:
    timestamp = time.strftime("%Y-%m-%d %H:%M:%S")
    line = f"[{timestamp}] {message}"
    print(line)
    LOG_LINES.append(line)


def write_report(path: Path, summary: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(LOG_LINES + ["", "SUMMARY", json.dumps(summary, indent=2)]), encoding="utf-8")


def run_cli(argv: list[str]) -> tuple[int, dict]:
    buffer = io.StringIO()
    started = time.perf_counter()
    with contextlib.redirect_stdout(buffer):
        code = cli_main(argv)
    elapsed = time.perf_counter() - started
    log(f"flowcast {' '.join(argv)} -> exit={code} ({elapsed:.1f}s)")
    text = buffer.getvalue().strip()
    try:
        payload = json.loads(text) if text else {}
    except json.JSONDecodeError:
        payload = {"raw": text[:400]}
    return code, payload


def main() -> int:
    parser = argparse.ArgumentParser()
    repo_root = Path(__file__).resolve().parents[1]
    parser.add_argument("--config", default=str(repo_root / "configs" / "desk.yaml"))
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--log-level", default="WARNING")
    args = parser.parse_args()

    workspace_root = resolve_workspace_root()
    out_dir = workspace_root / "desk" / f"seed{args.seed}"
    summary: dict = {"errors": [], "warnings": []}
    log(f"workspace_root={workspace_root}")
    log(f"config={args.config}")

    common = ["--log-level", args.log_level]
    code, synth = run_cli(common + ["synth", "--config", args.config, "--seed", str(args.seed), "--out", str(out_dir / "data")])
    if code != 0:
        summary["errors"].append("synth failed")

    code, trained = run_cli(common + ["train", "--config", args.config, "--seed", str(args.seed), "--out", str(out_dir)])
    if code != 0:
        summary["errors"].append("train failed")
        write_report(reports_dir() / "DESK_REPORT.md", summary)
        return 1
    initial = trained.get("initial_train_loss") or 0.0
    final = trained.get("final_train_loss") or 0.0
    log(f"train loss initial={initial:.4f} final={final:.4f}")
    if not final < 0.5 * initial:
        summary["warnings"].append("train loss did not halve")

    code, evaluated = run_cli(
        common + ["eval", "--config", args.config, "--seed", str(args.seed), "--checkpoint", trained["checkpoint"]]
    )
    if code != 0:
        summary["errors"].append("eval failed")
    else:
        model_mae = evaluated["model"][-1]["mae"]
        baseline_mae = evaluated["baseline"][-1]["mae"]
        log(f"test window MAE model={model_mae:.4f} historical_average={baseline_mae:.4f}")
        if not model_mae < baseline_mae:
            summary["warnings"].append("model did not beat the historical average")

    code, grads = run_cli(common + ["gradcheck", "--config", args.config, "--seed", str(args.seed)])
    if code != 0:
        failed = [r["op_name"] for r in grads.get("reports", []) if not r["pass"]]
        summary["errors"].append(f"gradcheck failed: {failed}")

    summary["success"] = not summary["errors"]
    summary["synth"] = synth
    summary["train"] = trained
    summary["config_hash"] = trained.get("config_hash")
    report_path = reports_dir() / "DESK_REPORT.md"
    write_report(report_path, summary)
    log(f"report written: {report_path}")
    return 0 if summary["success"] else 1


LOG_LINES: list[str] = []

if __name__ == "__main__":
    raise SystemExit(main())
