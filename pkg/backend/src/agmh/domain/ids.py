#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
运行种子与配置指纹（域层）
"""

import hashlib
import json
from typing import Any, Dict


def derive_run_seed(master_seed: int, run_id: int) -> int:
    """
    由主种子与运行编号派生独立的 64 位种子。

    Args:
        master_seed: 实验主种子
        run_id: 运行编号（0 起）

    Returns:
        [0, 2^64) 内的整数，同一输入总得到同一种子
    """
    raw = f"agmh|{int(master_seed)}|{int(run_id)}"
    return int.from_bytes(hashlib.md5(raw.encode("utf-8")).digest()[:8], "big")


def config_fingerprint(payload: Dict[str, Any]) -> str:
    content = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.md5(content.encode("utf-8")).hexdigest()[:12]
