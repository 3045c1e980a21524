#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
第 j 个分量的参数更新：块公式（以 S_j 为准）与等价的递推公式。

块公式：
    μ_j = (1/m_j) Σ s_j^(i)
    C_j = (S̃_j S̃_jᵀ + (m_j − 1) ε I_d) / (m_j − 1)，S̃_j 为逐列减去 μ_j
    w_i = m_i / Σ m_k

递推公式（只存 S_j 列的滑动均值与离差阵 M_j = S̃_j S̃_jᵀ）：
    μ_new = x/m + (m − 1)/m · μ_old
    M_new = M_old + m/(m − 1) · (x − μ_new)(x − μ_new)ᵀ
等价的协方差形式为
    C_new = (m − 2)/(m − 1) · (C_old − εI) + m/(m − 1)² · (x − μ_new)(x − μ_new)ᵀ + εI，
注意秩一项的系数是 m/(m − 1)²，不是 1/(m(m − 1))。
"""

from __future__ import annotations

import logging

import numpy as np

from ...core.errors import NotPositiveDefiniteError
from ..gaussmix import CovarianceMatrix, GaussianComponent, cholesky
from .state import AdaptiveState

logger = logging.getLogger(__name__)

# 首次分解失败时对称化并加上的抖动倍数
RETRY_JITTER = 10.0


def factorize_covariance(cov: np.ndarray, epsilon: float, component: int = -1) -> CovarianceMatrix:
    # 只有下三角参与分解，先消掉舍入造成的不对称
    cov = 0.5 * (cov + cov.T)
    L = cholesky(cov)
    if L is None:
        logger.warning(f"component {component}: covariance failed Cholesky, adding {RETRY_JITTER:g}*eps*I")
        cov = cov + RETRY_JITTER * epsilon * np.eye(cov.shape[0])
        L = cholesky(cov)
        if L is None:
            raise NotPositiveDefiniteError(
                f"component {component}: covariance is not positive definite after regularization",
                component=component, matrix=cov,
            )
    cov = np.array(cov, dtype=float)
    cov.setflags(write=False)
    L.setflags(write=False)
    return CovarianceMatrix(entries=cov, chol=L)


def _publish(state: AdaptiveState, j: int, mean: np.ndarray, cov: CovarianceMatrix, weights: np.ndarray) -> AdaptiveState:
    mean = np.array(mean, dtype=float)
    mean.setflags(write=False)
    comp = GaussianComponent(mean=mean, cov=cov, count=int(state.counts[j]))
    state.proposal = state.proposal.replace(j, comp, weights)
    return state


def block_update(state: AdaptiveState, j: int, epsilon: float) -> AdaptiveState:
    """按 S_j 的全部列重算 (μ_j, C_j)，并令 w_i = m_i / Σm_k。"""
    S = state.columns(j)
    m = int(state.counts[j])
    if S.shape[1] != m:
        raise RuntimeError(f"S_{j} has {S.shape[1]} columns but m_{j} = {m}")
    d = S.shape[0]
    mean = S.mean(axis=1)
    if m >= 2:
        S_tilde = S - mean[:, None]
        C = (S_tilde @ S_tilde.T + (m - 1) * epsilon * np.eye(d)) / (m - 1)
        cov = factorize_covariance(C, epsilon, j)
    else:
        # m_j = 1：分母为零，沿用原协方差
        cov = state.proposal.components[j].cov
    weights = state.counts / state.counts.sum()
    return _publish(state, j, mean, cov, weights)


def accumulate(state: AdaptiveState, j: int, x_new: np.ndarray) -> AdaptiveState:
    """把 x_new 并入 S_j 的滑动均值与离差阵（m_j 须已加一）。"""
    m = int(state.counts[j])
    if m < 2:
        raise RuntimeError(f"accumulate needs m_{j} >= 2, got {m}")
    center = x_new / m + (m - 1) / m * state.centers[j]
    r = x_new - center
    state.scatters[j] += (m / (m - 1)) * np.outer(r, r)
    state.centers[j] = center
    return state


def recursive_update(state: AdaptiveState, j: int, x_new: np.ndarray, epsilon: float) -> AdaptiveState:
    """与 block_update 结果一致，但不需要保存 S_j。"""
    accumulate(state, j, x_new)
    m = int(state.counts[j])
    d = state.centers.shape[1]
    cov = factorize_covariance(state.scatters[j] / (m - 1) + epsilon * np.eye(d), epsilon, j)
    # Σ m_k = N + 已执行的分配次数
    weights = state.counts / (state.assignments + state.size)
    return _publish(state, j, state.centers[j], cov, weights)
