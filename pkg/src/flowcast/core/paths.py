"""路径工具：集中处理工作区目录，方便未来迁移。"""

from __future__ import annotations

import os
from pathlib import Path

WORKSPACE_ENV_KEY = "FLOWCAST_WORKSPACE_ROOT"

REPO_ROOT = Path(__file__).resolve().parents[3]


def resolve_workspace_root(default: Path | None = None) -> Path:
    """根据环境变量或默认值确定产物根目录。"""

    env_value = os.getenv(WORKSPACE_ENV_KEY)
    if env_value:
        return Path(env_value).expanduser().resolve()
    if default is not None:
        return default.expanduser().resolve()
    # 默认回退到仓库内的 workspace/，与 CLI 默认输出保持一致
    return REPO_ROOT / "workspace"


def checkpoints_dir(root: Path | None = None) -> Path:
    return (root or resolve_workspace_root()) / "checkpoints"


def reports_dir(root: Path | None = None) -> Path:
    return (root or resolve_workspace_root()) / "reports"


def synthetic_dir(root: Path | None = None) -> Path:
    return (root or resolve_workspace_root()) / "synthetic"
