"""模型检查点：u64 manifest 长度 + JSON manifest + 逐参数 TNS1 负载。

manifest 记录 name -> offset -> dims，offset 相对于 manifest 之后的负载起点。
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from flowcast.core import get_logger
from flowcast.core.errors import FormatError, ShapeError
from flowcast.data.tns1 import decode_tns1, encode_tns1

from .params import ModelParams, ModelSpec

logger = get_logger(__name__)

CHECKPOINT_FORMAT = "flowcast-checkpoint/1"
_LENGTH = struct.Struct("<Q")


@dataclass(slots=True)
class Checkpoint:
    arrays: Dict[str, NDArray[np.float64]]
    config_hash: str = ""
    config: Dict[str, Any] = field(default_factory=dict)
    f_in: Optional[int] = None

    def dims(self) -> Dict[str, Tuple[int, ...]]:
        return {name: tuple(value.shape) for name, value in self.arrays.items()}

    def to_params(self, spec: ModelSpec) -> ModelParams:
        """按模型结构还原参数；维度不符时在报错中同时列出两组维度。"""

        expected = spec.param_shapes()
        actual = self.dims()
        if expected != actual:
            mismatched = sorted(
                name for name in set(expected) | set(actual) if expected.get(name) != actual.get(name)
            )
            raise ShapeError(
                "检查点与模型结构不一致: "
                f"checkpoint dims {{{_format_dims(actual, mismatched)}}} vs "
                f"model dims {{{_format_dims(expected, mismatched)}}}"
            )
        return ModelParams(spec=spec, values={k: v.copy() for k, v in self.arrays.items()})


def _format_dims(dims: Dict[str, Tuple[int, ...]], names: List[str]) -> str:
    return ", ".join(f"{name}: {list(dims[name]) if name in dims else None}" for name in names)


def save_checkpoint(
    path: str | Path,
    params: ModelParams,
    *,
    config_hash: str = "",
    config: Optional[Dict[str, Any]] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    entries: List[Dict[str, Any]] = []
    blobs: List[bytes] = []
    offset = 0
    for name in sorted(params.values):
        blob = encode_tns1(params.values[name], dtype="f64")
        entries.append(
            {"name": name, "offset": offset, "length": len(blob), "dims": list(params.values[name].shape)}
        )
        blobs.append(blob)
        offset += len(blob)
    manifest = {
        "format": CHECKPOINT_FORMAT,
        "config_hash": config_hash,
        "config": config or {},
        "f_in": params.spec.f_in,
        "params": entries,
    }
    encoded = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with path.open("wb") as handle:
        handle.write(_LENGTH.pack(len(encoded)))
        handle.write(encoded)
        for blob in blobs:
            handle.write(blob)
    logger.info("Saved checkpoint %s (%d tensors, %d bytes)", path, len(entries), offset)
    return path


def load_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"检查点不存在: {path}")
    data = path.read_bytes()
    if len(data) < _LENGTH.size:
        raise FormatError("检查点头部被截断", offset=len(data))
    (manifest_len,) = _LENGTH.unpack_from(data, 0)
    base = _LENGTH.size + manifest_len
    if base > len(data):
        raise FormatError(f"manifest 长度 {manifest_len} 超出文件大小 {len(data)}", offset=0)
    try:
        manifest = json.loads(data[_LENGTH.size : base].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"manifest 无法解析: {exc}", offset=_LENGTH.size) from exc
    if manifest.get("format") != CHECKPOINT_FORMAT:
        raise FormatError(f"未知检查点格式 {manifest.get('format')!r}", offset=_LENGTH.size)

    arrays: Dict[str, NDArray[np.float64]] = {}
    for entry in manifest["params"]:
        start = base + int(entry["offset"])
        stop = start + int(entry["length"])
        if stop > len(data):
            raise FormatError(f"参数 {entry['name']} 的负载被截断", offset=len(data))
        value = decode_tns1(data[start:stop], base_offset=start, expect_dtype="f64")
        if list(value.shape) != list(entry["dims"]):
            raise FormatError(
                f"参数 {entry['name']} 维度 {list(value.shape)} 与 manifest {entry['dims']} 不一致",
                offset=start,
            )
        arrays[entry["name"]] = value
    logger.info("Loaded checkpoint %s (%d tensors)", path, len(arrays))
    return Checkpoint(
        arrays=arrays,
        config_hash=str(manifest.get("config_hash", "")),
        config=dict(manifest.get("config", {})),
        f_in=manifest.get("f_in"),
    )
