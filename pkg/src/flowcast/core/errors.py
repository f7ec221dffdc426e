"""统一异常层级，便于 CLI（命令行）按类别映射退出码。"""

from __future__ import annotations


class FlowcastError(Exception):
    """所有 flowcast 异常的基类。"""


class ParameterError(FlowcastError, ValueError):
    """标量参数越界，例如 bandwidth 不在 [1, T]。"""


class ShapeError(FlowcastError, ValueError):
    """张量维度不匹配，消息中需同时给出两侧 shape（形状）。"""


class ContractError(FlowcastError, ValueError):
    """调用方违反前置条件，例如对非标量节点做 backward。"""


class ConfigError(FlowcastError, ValueError):
    """配置非法或数据规模不足以支撑配置。"""


class DataError(FlowcastError, ValueError):
    """输入数据内容非法：负权重、全缺失序列等。"""


class ParseError(DataError):
    """文本格式解析失败，携带行号。"""

    def __init__(self, message: str, *, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class FormatError(DataError):
    """二进制容器格式错误，携带字节偏移。"""

    def __init__(self, message: str, *, offset: int) -> None:
        super().__init__(f"byte offset {offset}: {message}")
        self.offset = offset


class RangeError(FlowcastError, IndexError):
    """锚点 t0 的历史不足，附带最小可用 t0。"""

    def __init__(self, message: str, *, min_t0: int) -> None:
        super().__init__(f"{message} (minimal admissible t0 = {min_t0})")
        self.min_t0 = min_t0


class NumericalError(FlowcastError, ArithmeticError):
    """数值异常：奇异矩阵、NaN/Inf。"""


class TrainingAborted(FlowcastError, RuntimeError):
    """训练中止（NaN 或发散），记录 epoch/batch 坐标。"""

    def __init__(self, message: str, *, epoch: int, batch: int) -> None:
        super().__init__(f"epoch {epoch}, batch {batch}: {message}")
        self.epoch = epoch
        self.batch = batch
