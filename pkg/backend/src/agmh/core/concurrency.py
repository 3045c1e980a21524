#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""链级并发配置：每条链独立 RNG 与状态，池的大小受 worker 数约束。"""

from __future__ import annotations

import concurrent.futures as _f
import os
from typing import Optional, Union

from .settings import get_settings

Pool = Union[_f.ProcessPoolExecutor, _f.ThreadPoolExecutor]


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except Exception:
        return default


def resolve_worker_count(task_count: int, max_workers: Optional[int] = None) -> int:
    limit = max_workers or get_settings().resolved_workers()
    limit = min(int(limit), _int_env("AGMH_GLOBAL_MAX_WORKERS", 64))
    return max(1, min(max(1, task_count or 1), limit))


def create_run_pool(task_count: int, max_workers: Optional[int] = None, executor: Optional[str] = None) -> Pool:
    workers = resolve_worker_count(task_count, max_workers)
    kind = executor or get_settings().executor
    if kind == "process" and workers > 1:
        return _f.ProcessPoolExecutor(max_workers=workers)
    return _f.ThreadPoolExecutor(max_workers=workers)
