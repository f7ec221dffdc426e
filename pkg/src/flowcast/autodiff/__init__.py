"""反向模式自动微分：封闭算子集合的 tape 与有限差分校验。"""

from flowcast.core.datamodels import GradCheckReport

from .gradcheck import ScalarFn, finite_diff_check, op_gradcheck_suite
from .tape import Node, OpKind, Tape, backward, stable_sigmoid

__all__ = [
    "GradCheckReport",
    "Node",
    "OpKind",
    "ScalarFn",
    "Tape",
    "backward",
    "finite_diff_check",
    "op_gradcheck_suite",
    "stable_sigmoid",
]
