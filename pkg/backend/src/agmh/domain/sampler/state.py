#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""自适应链的可变状态与逐步记录。"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..gaussmix import GaussianComponent, MixtureProposal


@dataclass
class AdaptiveState:
    """
    单条链独占的自适应状态。

    counts[i] 即 m_i（初始为 1，对应 S_i 的第一列 μ_i^(0)）；
    centers/scatters 是 S_i 各列的滑动均值与离差阵，递推更新只用它们，
    history 仅在调试模式下保留完整的 S_i。
    """
    proposal: MixtureProposal
    counts: np.ndarray
    centers: np.ndarray
    scatters: np.ndarray
    history: Optional[List[List[np.ndarray]]] = None
    t: int = 0
    assignments: int = 0

    @classmethod
    def initial(cls, proposal: MixtureProposal, keep_history: bool = False) -> "AdaptiveState":
        n, d = proposal.size, proposal.dim
        history = [[c.mean.copy()] for c in proposal.components] if keep_history else None
        return cls(
            proposal=proposal,
            counts=np.ones(n, dtype=np.int64),
            centers=np.array(proposal.means, dtype=float),
            scatters=np.zeros((n, d, d)),
            history=history,
        )

    @property
    def size(self) -> int:
        return self.proposal.size

    def append(self, j: int, x: np.ndarray) -> None:
        """m_j += 1，并把 x 作为新列加入 S_j。"""
        self.counts[j] += 1
        self.assignments += 1
        if self.history is not None:
            self.history[j].append(np.array(x, dtype=float))

    def columns(self, j: int) -> np.ndarray:
        if self.history is None:
            raise RuntimeError("S_j is only kept when keep_history is enabled")
        return np.stack(self.history[j], axis=1)

    def snapshot(self) -> MixtureProposal:
        """当前提议分布，分量计数与 m_i 同步。"""
        comps = [
            GaussianComponent(mean=c.mean, cov=c.cov, count=int(m))
            for c, m in zip(self.proposal.components, self.counts)
        ]
        return MixtureProposal.create(self.proposal.weights, comps)


@dataclass(frozen=True, eq=False)
class ChainRecord:
    t: int
    state: np.ndarray
    proposed: np.ndarray
    alpha: float
    accepted: bool
    assigned_component: int = -1


@dataclass(eq=False)
class ChainTrace:
    """整条链的轨迹；states[t] 为 x_{t+1}，assigned 为 -1 表示该步未做分配。"""
    x0: np.ndarray
    states: np.ndarray
    proposed: np.ndarray
    alpha: np.ndarray
    accepted: np.ndarray
    assigned: np.ndarray
    initial_proposal: MixtureProposal
    final_proposal: MixtureProposal
    final_state: Optional[AdaptiveState] = field(default=None, repr=False)

    @property
    def length(self) -> int:
        return int(self.alpha.shape[0])

    @property
    def accept_rate(self) -> float:
        return float(np.mean(self.accepted)) if self.length else 0.0
