#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
链统计与实验指标：lag-1 相关、MSE、归一化常数、α 平均轨迹。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import logsumexp

from ..core.errors import DimensionError
from .gaussmix import MixtureProposal, mixture_log_density_batch, mixture_sample_batch
from .sampler.state import ChainRecord, ChainTrace
from .targets import TargetModel

logger = logging.getLogger(__name__)

# ESS 低于 n 的这一比例时，归一化常数估计被标记为不可靠
MIN_ESS_FRACTION = 0.01


def lag1_correlation(chain) -> np.ndarray:
    """
    逐坐标计算 (x_t, x_{t+1}) 的 Pearson 相关。

    某坐标方差为零时相关无定义，该位置返回 NaN（并记录 warning），不会静默地给 0。
    """
    x = np.asarray(chain, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 3:
        raise DimensionError(f"lag-1 correlation needs a (T >= 3, d) chain, got shape {x.shape}")
    a = x[:-1] - x[:-1].mean(axis=0)
    b = x[1:] - x[1:].mean(axis=0)
    saa = np.einsum("ij,ij->j", a, a)
    sbb = np.einsum("ij,ij->j", b, b)
    sab = np.einsum("ij,ij->j", a, b)
    denom = np.sqrt(saa * sbb)
    out = np.full(x.shape[1], np.nan)
    ok = denom > 0
    out[ok] = np.clip(sab[ok] / denom[ok], -1.0, 1.0)
    if not np.all(ok):
        logger.warning(f"lag-1 correlation undefined for constant coordinates {np.flatnonzero(~ok).tolist()}")
    return out


def mse_over_runs(estimates, truth) -> Union[float, np.ndarray]:
    """(1/R) Σ (estimate_r − truth)²；向量估计时逐坐标返回。"""
    e = np.asarray(estimates, dtype=float)
    if e.shape[0] < 1:
        raise ValueError("mse_over_runs needs at least one estimate")
    err = (e - np.asarray(truth, dtype=float)) ** 2
    out = err.mean(axis=0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class NormalizingConstantEstimate:
    value: float
    log_value: float
    ess: float
    n: int
    flagged: bool = False


def estimate_normalizing_constant(
    target: TargetModel,
    q_final: MixtureProposal,
    n_draws: int,
    rng: np.random.Generator,
) -> NormalizingConstantEstimate:
    """重要性抽样：Ẑ = (1/n) Σ p(x_i)/q(x_i)，x_i 从最终提议分布新抽取。"""
    if n_draws < 1:
        raise ValueError(f"n_draws must be positive, got {n_draws}")
    xs = mixture_sample_batch(q_final, rng, n_draws)
    log_w = target.log_density_batch(xs) - mixture_log_density_batch(xs, q_final)
    log_z = float(logsumexp(log_w) - math.log(n_draws))
    if math.isfinite(log_z):
        ess = float(math.exp(2.0 * logsumexp(log_w) - logsumexp(2.0 * log_w)))
    else:
        ess = 0.0
    flagged = ess < MIN_ESS_FRACTION * n_draws
    if flagged:
        logger.warning(f"normalizing constant estimate unreliable: ESS {ess:.1f} of {n_draws} draws")
    return NormalizingConstantEstimate(value=math.exp(log_z), log_value=log_z, ess=ess, n=n_draws, flagged=flagged)


def alpha_trace_average(records: Sequence[Sequence[Union[ChainRecord, float]]]) -> np.ndarray:
    """R 条等长链逐步平均 α；元素可以是 ChainRecord 也可以直接是 α 值。"""
    rows = []
    for run in records:
        rows.append([r.alpha if isinstance(r, ChainRecord) else float(r) for r in run])
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise DimensionError(f"alpha traces must have equal length, got {sorted(lengths)}")
    return np.mean(np.asarray(rows, dtype=float), axis=0)


def histogram_tv(samples, target: TargetModel, lo: float, hi: float, bins: int = 100, refine: int = 64) -> float:
    """一维样本直方图与目标在各区间上的质量之间的总变差距离（均在 [lo, hi] 内归一化）。"""
    if target.dim != 1:
        raise DimensionError("histogram_tv is defined for 1-D targets", expected=1, got=target.dim)
    s = np.asarray(samples, dtype=float).ravel()
    s = s[(s >= lo) & (s <= hi)]
    if s.size == 0:
        return 1.0
    counts, edges = np.histogram(s, bins=bins, range=(lo, hi))
    emp = counts / counts.sum()

    grid = np.linspace(lo, hi, bins * refine + 1)
    lp = target.log_density_batch(grid[:, None])
    dens = np.exp(lp - np.max(lp))
    cdf = cumulative_trapezoid(dens, grid, initial=0.0)
    mass = np.diff(cdf[::refine])
    mass = mass / mass.sum()
    return float(0.5 * np.sum(np.abs(emp - mass)))


@dataclass(eq=False)
class RunSummary:
    run_id: int
    seed: int
    mean_estimate: np.ndarray
    z_estimate: float
    z_flagged: bool
    lag1_corr: np.ndarray
    accept_rate_overall: float
    alpha_trace: np.ndarray
    final_proposal: MixtureProposal
    initial_proposal: Optional[MixtureProposal] = None
    extras: dict = field(default_factory=dict)


def summarize_chain(
    trace: ChainTrace,
    target: TargetModel,
    z_draws: int,
    rng: np.random.Generator,
    run_id: int = 0,
    seed: int = 0,
) -> RunSummary:
    """所有生成样本 x_1..x_T 都参与均值估计，不丢弃 burn-in。"""
    z = estimate_normalizing_constant(target, trace.final_proposal, z_draws, rng)
    return RunSummary(
        run_id=run_id,
        seed=seed,
        mean_estimate=trace.states.mean(axis=0),
        z_estimate=z.value,
        z_flagged=z.flagged,
        lag1_corr=lag1_correlation(trace.states),
        accept_rate_overall=trace.accept_rate,
        alpha_trace=trace.alpha.copy(),
        final_proposal=trace.final_proposal,
        initial_proposal=trace.initial_proposal,
    )
