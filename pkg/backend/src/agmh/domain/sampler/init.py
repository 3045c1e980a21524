#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""初始化：初始均值、初始状态 x_0，以及无先验信息时的黑盒配置。"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..schemas.config import InitMeans, SamplerConfig
from ..targets import Box

logger = logging.getLogger(__name__)

# 黑盒用法：较大的初始方差，T_train = 100·d
BLACKBOX_SIGMA2 = 10.0
TRAIN_PER_DIM = 100


def draw_initial_means(init: InitMeans, n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    if init.points is not None:
        return np.asarray(init.points, dtype=float).reshape(n, dim)
    if init.boxes is not None:
        boxes = [Box.from_bounds(b) for b in init.boxes]
    else:
        boxes = [Box.from_bounds(init.box)] * n
    return np.stack([b.uniform(rng) for b in boxes])


def initial_point(cfg: SamplerConfig, dim: int, rng: np.random.Generator) -> np.ndarray:
    if cfg.x0 == "standard_normal":
        return rng.standard_normal(dim)
    return np.asarray(cfg.x0, dtype=float)


def blackbox_init(
    target_dim: int,
    box: Box,
    N: int,
    rng: np.random.Generator,
    *,
    sigma2: float = BLACKBOX_SIGMA2,
    t_tot: int = 5000,
    t_stop: Optional[int] = None,
    epsilon: float = 1e-6,
    seed: int = 0,
) -> SamplerConfig:
    """均值在 box 内均匀抽取以覆盖支撑集，C_i = σ²·I_d，w = 1/N，T_train = 100·d。"""
    if box.dim != target_dim:
        raise ValueError(f"box has {box.dim} axes, target dimension is {target_dim}")
    means = np.stack([box.uniform(rng) for _ in range(N)])
    t_train = TRAIN_PER_DIM * target_dim
    logger.info(f"blackbox init: N={N} d={target_dim} sigma2={sigma2:g} t_train={t_train}")
    return SamplerConfig(
        components=N,
        t_train=t_train,
        t_stop=t_stop,
        t_tot=t_tot,
        epsilon=epsilon,
        init_means=InitMeans(points=means.tolist()),
        init_sigma2=sigma2,
        seed=seed,
    )
