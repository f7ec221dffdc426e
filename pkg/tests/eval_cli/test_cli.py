from __future__ import annotations

import json
from pathlib import Path

import pytest

from flowcast.eval_cli import cli_main
from flowcast.eval_cli.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE

REPO_ROOT = Path(__file__).resolve().parents[2]
DESK_CONFIG = REPO_ROOT / "configs" / "desk.yaml"


def _quick_config(tmp_path: Path, **overrides: object) -> Path:
    text = DESK_CONFIG.read_text(encoding="utf-8")
    text = text.replace("epochs: 40", "epochs: 2").replace("hidden_f: 16", "hidden_f: 8")
    for key, value in overrides.items():
        text += f"\n{key}: {value}\n"
    path = tmp_path / "quick.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def _json(capsys: pytest.CaptureFixture[str]) -> dict:
    return json.loads(capsys.readouterr().out)


def test_usage_errors() -> None:
    assert cli_main(["bogus"]) == EXIT_USAGE
    assert cli_main([]) == EXIT_USAGE
    assert cli_main(["eval"]) == EXIT_USAGE


def test_help_exits_cleanly(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main(["--help"]) == EXIT_OK
    assert "sweep-bandwidth" in capsys.readouterr().out


def test_gradcheck_suite(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main(["gradcheck"]) == EXIT_OK
    payload = _json(capsys)
    assert payload["pass"] is True
    assert len(payload["reports"]) == 14
    assert all(report["pass"] for report in payload["reports"])


def test_gradcheck_with_desk_config_passes(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main(["gradcheck", "--config", str(DESK_CONFIG)]) == EXIT_OK
    payload = _json(capsys)
    assert payload["pass"] is True
    model_reports = [r for r in payload["reports"] if r["op_name"].startswith("model.")]
    assert len(model_reports) == len(payload["reports"]) - 14
    assert model_reports
    assert all(r["pass"] and r["tolerance"] == 1e-4 for r in model_reports)


def test_synth_is_deterministic(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = cli_main(
            ["synth", "--config", str(DESK_CONFIG), "--seed", "7", "--out", str(out)]
        )
        assert code == EXIT_OK
        payload = _json(capsys)
        assert payload["dims"] == [120, 4, 1]
        outputs.append(out)
    a, b = outputs
    assert (a / "data.tns1").read_bytes() == (b / "data.tns1").read_bytes()
    assert (a / "adjacency.csv").read_bytes() == (b / "adjacency.csv").read_bytes()


def test_convert_check(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = tmp_path / "synth"
    assert cli_main(["synth", "--config", str(DESK_CONFIG), "--out", str(out)]) == EXIT_OK
    capsys.readouterr()
    assert cli_main(["convert-check", "--tns", str(out / "data.tns1")]) == EXIT_OK
    payload = _json(capsys)
    assert payload["valid"] is True
    assert payload["dims"] == [120, 4, 1]

    bad = tmp_path / "bad.tns1"
    bad.write_bytes(b"XXXX" + (out / "data.tns1").read_bytes()[4:])
    assert cli_main(["convert-check", "--tns", str(bad)]) == EXIT_FAILURE
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "byte offset 0" in captured.err

    assert cli_main(["convert-check", "--tns", str(tmp_path / "missing.tns1")]) == EXIT_FAILURE


def test_train_then_eval(tmp_path: Path, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = _quick_config(tmp_path)
    out = tmp_path / "run"
    assert cli_main(["train", "--config", str(config), "--out", str(out)]) == EXIT_OK
    trained = _json(capsys)
    assert Path(trained["checkpoint"]).exists()
    lines = (out / "train_report.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["config_hash"] == trained["config_hash"]

    code = cli_main(
        ["eval", "--config", str(config), "--seed", "7", "--checkpoint", trained["checkpoint"]]
    )
    assert code == EXIT_OK
    evaluated = _json(capsys)
    assert evaluated["config_hash"] == trained["config_hash"]
    assert evaluated["model"][-1]["scope"] == "window"
    assert len(evaluated["baseline"]) == len(evaluated["model"])


def test_train_defaults_to_workspace(tmp_path: Path, workspace: Path, capsys) -> None:
    config = _quick_config(tmp_path)
    assert cli_main(["train", "--config", str(config)]) == EXIT_OK
    payload = _json(capsys)
    expected = workspace / "checkpoints" / payload["config_hash"] / "model.ckpt"
    assert Path(payload["checkpoint"]) == expected.resolve()


def test_eval_with_mismatched_checkpoint(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    narrow = _quick_config(tmp_path)
    out = tmp_path / "run"
    assert cli_main(["train", "--config", str(narrow), "--out", str(out)]) == EXIT_OK
    capsys.readouterr()

    wide_dir = tmp_path / "wide"
    wide_dir.mkdir()
    wide = wide_dir / "wide.yaml"
    wide.write_text(
        DESK_CONFIG.read_text(encoding="utf-8").replace("epochs: 40", "epochs: 2"), encoding="utf-8"
    )
    code = cli_main(["eval", "--config", str(wide), "--checkpoint", str(out / "model.ckpt")])
    assert code == EXIT_FAILURE
    err = capsys.readouterr().err
    assert "checkpoint dims" in err
    assert "model dims" in err


def test_invalid_config_fails(tmp_path: Path) -> None:
    config = _quick_config(tmp_path, bandwidth=9)
    assert cli_main(["train", "--config", str(config)]) == EXIT_FAILURE


def test_sweep_writes_report(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = _quick_config(tmp_path)
    target = tmp_path / "sweep.json"
    code = cli_main(
        ["sweep-bandwidth", "--config", str(config), "--range", "1-2", "--out", str(target)]
    )
    assert code == EXIT_OK
    payload = _json(capsys)
    assert [entry["b"] for entry in payload["entries"]] == [1, 2]
    assert json.loads(target.read_text(encoding="utf-8")) == payload
    assert cli_main(["sweep-bandwidth", "--config", str(config), "--range", "1,1"]) == EXIT_FAILURE
