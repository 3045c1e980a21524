from __future__ import annotations

import os
from functools import lru_cache
from typing import Any, Dict, Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    # 基础
    log_level: str = "INFO"

    # 输出目录（每个实验写入 <output_dir>/<config name>/）
    output_dir: str = "output"

    # 并发：每条链一个任务
    max_workers: Optional[int] = Field(default=None, ge=1)
    executor: Literal["process", "thread"] = "process"

    # 诊断默认值
    z_draws: int = Field(default=5000, ge=1)
    oracle_grid: Optional[int] = Field(default=None, ge=3)

    # ENV 优先（允许使用 .env 本地文件）
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="AGMH_",
        env_nested_delimiter="__",
        extra="ignore",
    )

    def resolved_workers(self) -> int:
        return int(self.max_workers or os.cpu_count() or 1)


@lru_cache(maxsize=1)
def get_settings() -> AppSettings:
    return AppSettings()


def settings_diagnostics() -> Dict[str, Any]:
    """生成运行配置简要诊断信息。"""
    s = get_settings()
    return {
        "output_dir": s.output_dir,
        "executor": s.executor,
        "max_workers": s.resolved_workers(),
        "z_draws": s.z_draws,
        "oracle_grid": s.oracle_grid,
        "log_level": s.log_level,
    }
