#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""标准（非自适应）独立 MH：即 T_stop = 0 的自适应链，提议分布始终为初始配置。"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ..gaussmix import MixtureProposal
from ..schemas.config import SamplerConfig
from ..targets import TargetModel
from .agm import mh_move, run_chain
from .state import ChainRecord, ChainTrace


def baseline_step(
    x_t: np.ndarray,
    q_fixed: MixtureProposal,
    target: TargetModel,
    rng: np.random.Generator,
    t: int = 0,
) -> Tuple[np.ndarray, ChainRecord]:
    x_next, x_prop, alpha, accepted = mh_move(x_t, q_fixed, target, rng)
    return x_next, ChainRecord(t=t, state=x_next, proposed=x_prop, alpha=alpha, accepted=accepted)


def run_baseline_chain(target: TargetModel, cfg: SamplerConfig, rng: Optional[np.random.Generator] = None) -> ChainTrace:
    return run_chain(target, cfg.frozen(), rng)
