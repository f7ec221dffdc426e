"""flowcast 顶层包：多片段 M-product 图卷积交通流预测引擎。"""

__version__ = "0.1.0"
