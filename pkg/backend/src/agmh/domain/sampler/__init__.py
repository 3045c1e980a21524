# -*- coding: utf-8 -*-
from .agm import acceptance_probability, assign_component, init_chain, mh_move, run_chain, step
from .baseline import baseline_step, run_baseline_chain
from .init import blackbox_init
from .state import AdaptiveState, ChainRecord, ChainTrace
from .updates import block_update, recursive_update

__all__ = [
    "AdaptiveState",
    "ChainRecord",
    "ChainTrace",
    "acceptance_probability",
    "assign_component",
    "baseline_step",
    "blackbox_init",
    "block_update",
    "init_chain",
    "mh_move",
    "recursive_update",
    "run_baseline_chain",
    "run_chain",
    "step",
]
