"""图模块：拓扑读取、对称归一化与邻接张量构造。"""

from .adjacency import (
    adjacency_set,
    build_adjacency_tensor,
    dense_adjacency,
    gaussian_kernel_affinity,
    normalize_adjacency,
    ring_topology,
)
from .loader import load_adjacency_csv, write_adjacency_csv
from .types import AdjacencyTensor, Edge, GraphTopology

__all__ = [
    "AdjacencyTensor",
    "Edge",
    "GraphTopology",
    "adjacency_set",
    "build_adjacency_tensor",
    "dense_adjacency",
    "gaussian_kernel_affinity",
    "load_adjacency_csv",
    "normalize_adjacency",
    "ring_topology",
    "write_adjacency_csv",
]
