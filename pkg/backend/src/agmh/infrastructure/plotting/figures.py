#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
根据作图数据文件（alpha_trace.csv / ellipses.csv）渲染 PNG。

- alpha_trace.png：逐步平均接受率
- proposal_initial.png / proposal_final.png：首次运行的提议分布
  d = 2 时画均值（方块）与 2σ 椭圆，d = 1 时画加权分量密度与目标密度
"""

from __future__ import annotations

import logging
import math
import os
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.patches import Ellipse  # noqa: E402
from scipy.integrate import trapezoid  # noqa: E402
from scipy.stats import norm  # noqa: E402

from ...domain.targets import TargetModel  # noqa: E402
from ..storage.output_writer import figures_dir  # noqa: E402

logger = logging.getLogger(__name__)

_PNG_META = {"Software": None}
_ELLIPSE_SCALE = 2.0


def _save(fig, path: str) -> str:
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_alpha_trace(df: pd.DataFrame, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(df["t"], df["alpha_mean"], lw=0.8)
    ax.set_xlabel("iteration t")
    ax.set_ylabel("mean acceptance probability")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def _target_grid_2d(target: TargetModel, rows: pd.DataFrame, n: int = 200):
    lo = target.default_box().lower
    hi = target.default_box().upper
    # 视窗取目标盒子与分量均值的并集，避免盒子过大时细节被压缩
    span_lo = np.minimum(rows[["mean_0", "mean_1"]].min().to_numpy() - 3.0, hi)
    span_hi = np.maximum(rows[["mean_0", "mean_1"]].max().to_numpy() + 3.0, lo)
    span_lo = np.maximum(span_lo, lo)
    span_hi = np.minimum(span_hi, hi)
    xs = np.linspace(span_lo[0], span_hi[0], n)
    ys = np.linspace(span_lo[1], span_hi[1], n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    lp = target.log_density_batch(np.column_stack([gx.ravel(), gy.ravel()])).reshape(gx.shape)
    return gx, gy, np.exp(lp - np.max(lp))


def plot_ellipses(rows: pd.DataFrame, target: TargetModel, title: str, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5, 5))
    gx, gy, dens = _target_grid_2d(target, rows)
    ax.contour(gx, gy, dens, levels=6, colors="0.6", linewidths=0.6)
    for _, r in rows.iterrows():
        alpha = 0.25 + 0.75 * float(r["weight"])
        ax.add_patch(
            Ellipse(
                (r["mean_0"], r["mean_1"]),
                width=2 * _ELLIPSE_SCALE * r["axis_major"],
                height=2 * _ELLIPSE_SCALE * r["axis_minor"],
                angle=math.degrees(r["orientation"]),
                fill=False,
                lw=1.2,
                alpha=min(alpha, 1.0),
            )
        )
        ax.plot(r["mean_0"], r["mean_1"], "s", ms=5, alpha=min(alpha, 1.0))
    ax.set_xlim(gx.min(), gx.max())
    ax.set_ylim(gy.min(), gy.max())
    ax.set_aspect("equal")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_densities_1d(rows: pd.DataFrame, target: TargetModel, title: str, path: str) -> str:
    box = target.default_box()
    xs = np.linspace(box.lower[0], box.upper[0], 1000)
    lp = target.log_density_batch(xs[:, None])
    dens = np.exp(lp - np.max(lp))
    dens = dens / trapezoid(dens, xs)

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(xs, dens, color="0.4", lw=1.5, label="target")
    mix = np.zeros_like(xs)
    for _, r in rows.iterrows():
        comp = float(r["weight"]) * norm.pdf(xs, loc=r["mean_0"], scale=r["axis_major"])
        mix += comp
        ax.plot(xs, comp, lw=0.8, ls="--")
        ax.plot([r["mean_0"]], [0.0], "s", ms=5)
    ax.plot(xs, mix, lw=1.2, label="proposal")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def render_figures(out_dir: str, target: TargetModel) -> List[str]:
    """读取作图数据并写出 figures/*.png；d > 2 时只画 α 轨迹。"""
    fig_dir = figures_dir(out_dir)
    files = [plot_alpha_trace(pd.read_csv(os.path.join(out_dir, "alpha_trace.csv")), os.path.join(fig_dir, "alpha_trace.png"))]

    ellipses = pd.read_csv(os.path.join(out_dir, "ellipses.csv"))
    first = ellipses[ellipses["run_id"] == ellipses["run_id"].min()]
    for stage in ("initial", "final"):
        rows = first[first["stage"] == stage]
        if rows.empty:
            continue
        path = os.path.join(fig_dir, f"proposal_{stage}.png")
        if target.dim == 2:
            files.append(plot_ellipses(rows, target, f"{stage} proposal", path))
        elif target.dim == 1:
            files.append(plot_densities_1d(rows, target, f"{stage} proposal", path))
    logger.info(f"rendered {len(files)} figures into {fig_dir}")
    return files
