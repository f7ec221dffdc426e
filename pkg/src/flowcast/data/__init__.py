"""数据模块：容器、预处理、分段抽取、切分、合成数据与 TNS1 容器。"""

from .loader import PreparedData, load_dataset, prepare_data
from .preprocess import denormalize, interpolate_missing, preprocess_dataset, zero_mean_normalize
from .segments import extract_segments, min_anchor, segment_indices
from .split import SplitPlan, anchor_range, chronological_split, plan_split
from .synthetic import generate_synthetic
from .tns1 import Tns1Header, decode_tns1, encode_tns1, inspect_tns1, read_tns1, write_tns1
from .types import IndexRange, SegmentBatch, TrafficDataset

__all__ = [
    "IndexRange",
    "PreparedData",
    "SegmentBatch",
    "SplitPlan",
    "Tns1Header",
    "TrafficDataset",
    "anchor_range",
    "chronological_split",
    "decode_tns1",
    "denormalize",
    "encode_tns1",
    "extract_segments",
    "generate_synthetic",
    "inspect_tns1",
    "interpolate_missing",
    "load_dataset",
    "min_anchor",
    "plan_split",
    "preprocess_dataset",
    "prepare_data",
    "read_tns1",
    "segment_indices",
    "write_tns1",
    "zero_mean_normalize",
]
