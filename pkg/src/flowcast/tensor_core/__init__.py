"""张量代数模块：三阶稠密张量与 M-product 运算。"""

from .algebra import facewise_product, m_product, m_transform, m_transform_inverse
from .mixing import MixingMatrix, banded_m, identity_m, mixing_matrix
from .tensor import DenseTensor3, as_tensor3, fold3, frontal_slice, unfold3

__all__ = [
    "DenseTensor3",
    "MixingMatrix",
    "as_tensor3",
    "banded_m",
    "facewise_product",
    "fold3",
    "frontal_slice",
    "identity_m",
    "m_product",
    "m_transform",
    "m_transform_inverse",
    "mixing_matrix",
    "unfold3",
]
