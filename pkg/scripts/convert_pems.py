#!/usr/bin/env python3
"""
Convert a published PEMS archive into flowcast inputs.

  <name>.npz  ("data" array, T_total x N x F)  ->  data.tns1 (+ mask.tns1)
  <name>.csv  (from,to,cost distance list)     ->  adjacency.csv (validated, re-written)

The engine itself only reads TNS1 + CSV; this script is the one place that
touches the third-party archive layout.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
import sys

import numpy as np

from flowcast.core import FlowcastError, setup_logging
from flowcast.data import inspect_tns1, write_tns1
from flowcast.graph import load_adjacency_csv, write_adjacency_csv


def parse_features(text: str, available: int) -> list[int]:
    if ":" in text:
        start, stop = (int(part) for part in text.split(":", 1))
        return list(range(start, min(stop, available)))
    return [int(part) for part in text.split(",") if part.strip()]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--npz", required=True, help="PEMS archive, e.g. PEMS08.npz")
    ap.add_argument("--distance", required=True, help="distance list, e.g. PEMS08.csv")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--features", default="0", help='feature indices: "0", "0,1,2" or "0:3"')
    ap.add_argument("--zero-as-missing", action="store_true", help="mark zero readings as missing")
    args = ap.parse_args()
    setup_logging("INFO")

    npz_path = Path(args.npz)
    if not npz_path.exists():
        print(f"archive not found: {npz_path}", file=sys.stderr)
        return 1
    with np.load(npz_path) as archive:
        if "data" not in archive:
            print(f"{npz_path} has no 'data' array (keys: {list(archive.keys())})", file=sys.stderr)
            return 1
        data = np.asarray(archive["data"], dtype=np.float64)
    if data.ndim == 2:
        data = data[:, :, np.newaxis]
    features = parse_features(args.features, data.shape[2])
    if not features or max(features) >= data.shape[2]:
        print(f"invalid --features {args.features!r} for F={data.shape[2]}", file=sys.stderr)
        return 1
    cube = data[:, :, features]

    out_dir = Path(args.out)
    try:
        topology = load_adjacency_csv(args.distance, num_nodes=cube.shape[1])
        cube_path = write_tns1(out_dir / "data.tns1", cube)
        inspect_tns1(cube_path)
        mask_path = None
        if args.zero_as_missing:
            mask = (cube == 0).astype(np.float32)
            if mask.any():
                mask_path = write_tns1(out_dir / "mask.tns1", mask, dtype="f32")
        csv_path = write_adjacency_csv(topology, out_dir / "adjacency.csv")
    except FlowcastError as exc:
        print(f"conversion failed: {exc}", file=sys.stderr)
        return 1

    summary = {
        "data": str(cube_path),
        "mask": str(mask_path) if mask_path else None,
        "adjacency": str(csv_path),
        "dims": list(cube.shape),
        "edges": len(topology.edges),
        "features": features,
    }
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
