from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import pytest

from flowcast.core import FormatError
from flowcast.data.tns1 import decode_tns1, encode_tns1, inspect_tns1, read_tns1, write_tns1


def test_header_layout() -> None:
    blob = encode_tns1(np.arange(6.0).reshape(2, 3))
    assert blob[:4] == b"TNS1"
    assert blob[4] == 2
    assert blob[5] == 2
    assert struct.unpack("<2Q", blob[6:22]) == (2, 3)
    assert len(blob) == 22 + 6 * 8
    assert struct.unpack("<d", blob[22 + 8 : 22 + 16]) == (1.0,)


def test_file_round_trip(tmp_path: Path, rng: np.random.Generator) -> None:
    tensor = rng.normal(size=(5, 3, 2))
    path = write_tns1(tmp_path / "x.tns1", tensor)
    np.testing.assert_array_equal(read_tns1(path), tensor)
    header = inspect_tns1(path)
    assert header.dims == (5, 3, 2)
    assert header.to_dict()["dtype"] == "f64"


def test_f32_payload_is_widened(tmp_path: Path) -> None:
    path = write_tns1(tmp_path / "x.tns1", np.array([[0.5, 1.25]]), dtype="f32")
    assert path.stat().st_size == 6 + 16 + 8
    values = read_tns1(path)
    assert values.dtype == np.float64
    np.testing.assert_array_equal(values, [[0.5, 1.25]])


def test_bad_magic_reports_offset_zero() -> None:
    blob = b"TNS2" + encode_tns1(np.ones(2))[4:]
    with pytest.raises(FormatError) as excinfo:
        decode_tns1(blob)
    assert excinfo.value.offset == 0


def test_payload_size_mismatch_names_both_sizes() -> None:
    blob = encode_tns1(np.ones((2, 2)))[:-8]
    with pytest.raises(FormatError) as excinfo:
        decode_tns1(blob)
    assert excinfo.value.offset == 6 + 16
    assert "32" in str(excinfo.value)
    assert "24" in str(excinfo.value)


def test_dtype_checks() -> None:
    blob = encode_tns1(np.ones(3), dtype="f32")
    with pytest.raises(FormatError) as excinfo:
        decode_tns1(blob, expect_dtype="f64")
    assert excinfo.value.offset == 4

    unknown = blob[:4] + bytes([7]) + blob[5:]
    with pytest.raises(FormatError) as excinfo:
        decode_tns1(unknown)
    assert excinfo.value.offset == 4


def test_truncated_header() -> None:
    with pytest.raises(FormatError):
        decode_tns1(b"TNS")
    with pytest.raises(FormatError):
        decode_tns1(encode_tns1(np.ones((2, 2)))[:10])


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        read_tns1(tmp_path / "absent.tns1")
