"""多分段张量图卷积模型：TM-GCN 分支、时间投影、AFF 融合与检查点。"""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .fusion import aff_fuse, aff_node, attention_map, feature_mix
from .layers import m_product_node, temporal_project, tmgcn_layer_forward, tmgcn_layer_node
from .network import bind_adjacency, bind_params, forward_nodes, model_forward, predict
from .params import (
    AffParams,
    BranchConfig,
    ModelParams,
    ModelSpec,
    TmgcnLayerParams,
    bottleneck_width,
    init_params,
    params_from_arrays,
)

__all__ = [
    "AffParams",
    "BranchConfig",
    "Checkpoint",
    "ModelParams",
    "ModelSpec",
    "TmgcnLayerParams",
    "aff_fuse",
    "aff_node",
    "attention_map",
    "bind_adjacency",
    "bind_params",
    "bottleneck_width",
    "feature_mix",
    "forward_nodes",
    "init_params",
    "load_checkpoint",
    "m_product_node",
    "model_forward",
    "params_from_arrays",
    "predict",
    "save_checkpoint",
    "temporal_project",
    "tmgcn_layer_forward",
    "tmgcn_layer_node",
]
