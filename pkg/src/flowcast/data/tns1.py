"""TNS1 张量容器（小端）。

布局：bytes 0-3 魔数 "TNS1"；byte 4 dtype（1=f32, 2=f64）；byte 5 ndim；
随后 ndim 个 u64 维度；最后是行主序（row-major）负载。
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from flowcast.core import get_logger
from flowcast.core.errors import FormatError

logger = get_logger(__name__)

MAGIC = b"TNS1"
DTYPE_CODES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
DTYPE_NAMES = {"f32": 1, "f64": 2}
PREAMBLE = 6

DtypeName = Literal["f32", "f64"]


@dataclass(frozen=True, slots=True)
class Tns1Header:
    dtype_code: int
    dims: Tuple[int, ...]
    header_bytes: int

    @property
    def dtype(self) -> np.dtype:
        return DTYPE_CODES[self.dtype_code]

    @property
    def payload_bytes(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) * self.dtype.itemsize

    @property
    def total_bytes(self) -> int:
        return self.header_bytes + self.payload_bytes

    def to_dict(self) -> dict:
        return {
            "dtype": "f32" if self.dtype_code == 1 else "f64",
            "dims": list(self.dims),
            "header_bytes": self.header_bytes,
            "payload_bytes": self.payload_bytes,
        }


def parse_header(buffer: bytes, *, base_offset: int = 0) -> Tns1Header:
    """解析头部；所有错误的偏移量均相对于文件起点（base_offset 用于内嵌容器）。"""

    if len(buffer) < PREAMBLE:
        raise FormatError(
            f"头部被截断：需要 {PREAMBLE} 字节，实际 {len(buffer)}", offset=base_offset + len(buffer)
        )
    if buffer[:4] != MAGIC:
        raise FormatError(f"魔数错误：期望 {MAGIC!r}，实际 {bytes(buffer[:4])!r}", offset=base_offset)
    dtype_code = buffer[4]
    if dtype_code not in DTYPE_CODES:
        raise FormatError(f"未知 dtype 编码 {dtype_code}（仅支持 1=f32, 2=f64）", offset=base_offset + 4)
    ndim = buffer[5]
    if ndim < 1:
        raise FormatError("ndim 需 >= 1", offset=base_offset + 5)
    header_bytes = PREAMBLE + 8 * ndim
    if len(buffer) < header_bytes:
        raise FormatError(
            f"维度表被截断：需要 {header_bytes} 字节，实际 {len(buffer)}",
            offset=base_offset + len(buffer),
        )
    dims = struct.unpack(f"<{ndim}Q", bytes(buffer[PREAMBLE:header_bytes]))
    return Tns1Header(dtype_code=dtype_code, dims=tuple(int(d) for d in dims), header_bytes=header_bytes)


def encode_tns1(tensor: ArrayLike, *, dtype: DtypeName = "f64") -> bytes:
    code = DTYPE_NAMES[dtype]
    array = np.ascontiguousarray(np.asarray(tensor), dtype=DTYPE_CODES[code])
    if array.ndim < 1 or array.ndim > 255:
        raise FormatError(f"ndim={array.ndim} 无法写入 TNS1", offset=5)
    header = MAGIC + bytes([code, array.ndim]) + struct.pack(f"<{array.ndim}Q", *array.shape)
    return header + array.tobytes(order="C")


def decode_tns1(
    buffer: bytes,
    *,
    base_offset: int = 0,
    expect_dtype: Optional[DtypeName] = None,
) -> NDArray[np.float64]:
    """解码一个完整容器；buffer 长度必须与头部声明的负载完全一致。"""

    header = parse_header(buffer, base_offset=base_offset)
    if expect_dtype is not None and header.dtype_code != DTYPE_NAMES[expect_dtype]:
        raise FormatError(
            f"dtype 不匹配：期望 {expect_dtype}，文件为 {header.to_dict()['dtype']}",
            offset=base_offset + 4,
        )
    payload = len(buffer) - header.header_bytes
    if payload != header.payload_bytes:
        raise FormatError(
            f"负载长度不匹配：头部维度 {header.dims} 需要 {header.payload_bytes} 字节，"
            f"实际 {payload} 字节",
            offset=base_offset + header.header_bytes,
        )
    values = np.frombuffer(buffer, dtype=header.dtype, offset=header.header_bytes)
    return values.reshape(header.dims).astype(np.float64)


def write_tns1(path: str | Path, tensor: ArrayLike, *, dtype: DtypeName = "f64") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_tns1(tensor, dtype=dtype))
    logger.debug("Wrote TNS1 %s shape=%s", path, np.shape(tensor))
    return path


def read_tns1(path: str | Path, *, expect_dtype: Optional[DtypeName] = None) -> NDArray[np.float64]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"TNS1 文件不存在: {path}")
    return decode_tns1(path.read_bytes(), expect_dtype=expect_dtype)


def inspect_tns1(path: str | Path) -> Tns1Header:
    """只校验头部与文件长度，不解码负载（convert-check 使用）。"""

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"TNS1 文件不存在: {path}")
    data = path.read_bytes()
    header = parse_header(data)
    payload = len(data) - header.header_bytes
    if payload != header.payload_bytes:
        raise FormatError(
            f"负载长度不匹配：头部维度 {header.dims} 需要 {header.payload_bytes} 字节，"
            f"实际 {payload} 字节",
            offset=header.header_bytes,
        )
    return header
