#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
自适应高斯混合独立 MH 链。

每步：从混合提议分布抽 x'，按 MH 接受率决定 x_{t+1}；
t < T_stop 时把 x_{t+1} 分配给最近的分量（拒绝时 x_t 也会被重复分配），
t > T_train 时再更新该分量的参数与全部权重。
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Tuple

import numpy as np

from ...core.errors import AGMError, InvalidChainStateError
from ..gaussmix import MixtureProposal, as_vector, mixture_log_density_batch, mixture_sample
from ..schemas.config import SamplerConfig
from ..targets import TargetModel
from .init import draw_initial_means, initial_point
from .state import AdaptiveState, ChainRecord, ChainTrace
from .updates import accumulate, block_update, recursive_update

logger = logging.getLogger(__name__)


def acceptance_probability(x_curr, x_prop, target: TargetModel, q: MixtureProposal) -> float:
    """min[1, p(x')q(x_t) / (p(x_t)q(x'))]，全程在对数域计算。"""
    pts = np.stack([as_vector(x_curr, target.dim), as_vector(x_prop, target.dim)])
    lp = target.log_density_batch(pts)
    if not lp[0] > -math.inf:
        raise InvalidChainStateError(f"target log-density is {lp[0]} at the current state", state=pts[0])
    if not math.isfinite(lp[1]):
        return 0.0
    lq = mixture_log_density_batch(pts, q)
    log_ratio = float((lp[1] + lq[0]) - (lp[0] + lq[1]))
    if log_ratio >= 0.0:
        return 1.0
    return math.exp(log_ratio)


def assign_component(x, q: MixtureProposal) -> int:
    """欧氏距离最近的均值；并列时取最小下标。"""
    d2 = np.sum((q.means - np.asarray(x, dtype=float)) ** 2, axis=1)
    return int(np.argmin(d2))


def mh_move(x_t: np.ndarray, q: MixtureProposal, target: TargetModel, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, float, bool]:
    """一次独立 MH 转移：d+1 个抽样给提议，1 个均匀数做接受判定。"""
    x_prop = mixture_sample(q, rng)
    alpha = acceptance_probability(x_t, x_prop, target, q)
    accepted = bool(rng.random() < alpha)
    return (x_prop if accepted else x_t), x_prop, alpha, accepted


def step(
    state: AdaptiveState,
    x_t: np.ndarray,
    target: TargetModel,
    cfg: SamplerConfig,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, AdaptiveState, ChainRecord]:
    t = state.t
    if t >= cfg.t_tot:
        raise AGMError(f"chain already finished: t = {t} >= t_tot = {cfg.t_tot}")
    q = state.proposal
    x_next, x_prop, alpha, accepted = mh_move(x_t, q, target, rng)

    j = -1
    if t < cfg.stop:
        j = assign_component(x_next, q)
        state.append(j, x_next)
        if t > cfg.t_train:
            if cfg.update_rule == "block":
                block_update(state, j, cfg.epsilon)
            else:
                recursive_update(state, j, x_next, cfg.epsilon)
        elif cfg.update_rule == "recursive":
            accumulate(state, j, x_next)

    state.t = t + 1
    record = ChainRecord(t=t, state=x_next, proposed=x_prop, alpha=alpha, accepted=accepted, assigned_component=j)
    return x_next, state, record


def init_chain(target: TargetModel, cfg: SamplerConfig, rng: np.random.Generator) -> Tuple[np.ndarray, AdaptiveState]:
    """先抽初始均值，再抽 x_0；两者都消耗同一条随机流。"""
    means = draw_initial_means(cfg.init_means, cfg.components, target.dim, rng)
    proposal = MixtureProposal.uniform(means, cfg.init_sigma2)
    x0 = initial_point(cfg, target.dim, rng)
    if target.log_density(x0) == -math.inf:
        raise InvalidChainStateError(f"x0 = {x0.tolist()} lies outside the target support", state=x0)
    return x0, AdaptiveState.initial(proposal, keep_history=cfg.keep_history)


def run_chain(target: TargetModel, cfg: SamplerConfig, rng: Optional[np.random.Generator] = None) -> ChainTrace:
    """rng 缺省时按 cfg.seed 新建随机流。"""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    x, state = init_chain(target, cfg, rng)
    x0 = x.copy()
    initial = state.snapshot()
    T, d = cfg.t_tot, target.dim
    states = np.empty((T, d))
    proposed = np.empty((T, d))
    alpha = np.empty(T)
    accepted = np.zeros(T, dtype=bool)
    assigned = np.full(T, -1, dtype=np.int64)

    for t in range(T):
        x, state, rec = step(state, x, target, cfg, rng)
        states[t] = rec.state
        proposed[t] = rec.proposed
        alpha[t] = rec.alpha
        accepted[t] = rec.accepted
        assigned[t] = rec.assigned_component

    final = state.snapshot()
    logger.debug(
        f"chain done: T={T} accept_rate={accepted.mean():.4f} weights={np.round(final.weights, 4).tolist()}"
    )
    return ChainTrace(
        x0=x0,
        states=states,
        proposed=proposed,
        alpha=alpha,
        accepted=accepted,
        assigned=assigned,
        initial_proposal=initial,
        final_proposal=final,
        final_state=state,
    )
