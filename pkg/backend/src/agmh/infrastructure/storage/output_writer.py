#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
落盘工具：将实验产物写入输出目录（默认 <AppSettings.output_dir>/<config name>/）。
结构：
- <out_dir>/
  - summary.csv            # 每次运行一行（按 run_id 排序）+ aggregate 行
  - aggregate.csv          # metric,value：MSE、平均 lag-1 相关、平均接受率
  - proposals.csv          # 每次运行的最终提议分布，每个分量一行
  - alpha_trace.csv        # t, alpha_mean
  - ellipses.csv           # 初始/最终分量的椭圆描述
  - config.resolved.yaml   # 覆盖项生效后的配置
  - figures/*.png          # 仅 --render

所有浮点数按 17 位有效数字写出，不写时间戳，同配置同种子输出逐字节一致。
"""

from __future__ import annotations

import os
from typing import Any, Dict, Iterable, List, Sequence

import pandas as pd

FLOAT_FORMAT = "%.17g"


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def check_writable(out_dir: str) -> None:
    """确保目录存在且可写；失败时抛出 OSError。"""
    _ensure_dir(out_dir)
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"output directory {out_dir} is not writable")


def _write_frame(df: pd.DataFrame, path: str) -> str:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    return path


def write_summary(out_dir: str, rows: Sequence[Dict[str, Any]], aggregate_row: Dict[str, Any]) -> str:
    df = pd.DataFrame(list(rows) + [aggregate_row])
    return _write_frame(df, os.path.join(out_dir, "summary.csv"))


def write_aggregate(out_dir: str, metrics: Dict[str, float]) -> str:
    df = pd.DataFrame({"metric": list(metrics.keys()), "value": [float(v) for v in metrics.values()]})
    return _write_frame(df, os.path.join(out_dir, "aggregate.csv"))


def write_table(out_dir: str, filename: str, rows: Iterable[Dict[str, Any]], columns: List[str] = None) -> str:
    df = pd.DataFrame(list(rows), columns=columns)
    return _write_frame(df, os.path.join(out_dir, filename))


def write_text(out_dir: str, filename: str, content: str) -> str:
    path = os.path.join(out_dir, filename)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(content)
    return path


def figures_dir(out_dir: str) -> str:
    path = os.path.join(out_dir, "figures")
    _ensure_dir(path)
    return path


def list_artifacts(out_dir: str) -> List[Dict[str, Any]]:
    """列出输出目录中的产物文件（含 figures 子目录）。"""
    if not os.path.exists(out_dir):
        return []
    artifacts = []
    for root, _dirs, files in os.walk(out_dir):
        for filename in files:
            filepath = os.path.join(root, filename)
            artifacts.append({
                "name": os.path.relpath(filepath, out_dir),
                "size": os.stat(filepath).st_size,
                "type": _get_file_type(filename),
            })
    return sorted(artifacts, key=lambda x: x["name"])


def _get_file_type(filename: str) -> str:
    """根据文件名判断文件类型。"""
    ext = filename.lower().split('.')[-1] if '.' in filename else ""
    type_mapping = {
        "csv": "table",
        "yaml": "config",
        "png": "figure",
    }
    return type_mapping.get(ext, "unknown")
