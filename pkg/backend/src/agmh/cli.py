#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行入口：

    agmh run --config ex1 [--runs R] [--seed S] [--out DIR] [--workers W] [--render]
    agmh validate --config path/to/experiment.yaml
    agmh list

退出码：0 成功；1 运行/配置错误（AGMError）；2 参数错误（argparse）。
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .core.errors import AGMError
from .core.logging import setup_logging
from .core.settings import get_settings, settings_diagnostics
from .infrastructure.storage.output_writer import list_artifacts
from .services.config_service import apply_overrides, list_bundled, load_config
from .services.experiment_service import run_experiment

logger = logging.getLogger("agmh.cli")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got '{text}'")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agmh", description="Adaptive Gaussian-mixture Metropolis-Hastings experiments")
    parser.add_argument("--log-level", default=None, help="override AGMH_LOG_LEVEL")
    sub = parser.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True, help="YAML file or bundled config name")
    run.add_argument("--runs", type=_positive_int, default=None)
    run.add_argument("--seed", type=_seed, default=None, help="master seed")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--workers", type=_positive_int, default=None)
    run.add_argument("--executor", choices=["process", "thread"], default=None)
    run.add_argument("--render", action="store_true", default=None, help="also write figures/*.png")

    validate = sub.add_parser("validate", help="load and validate a config without running it")
    validate.add_argument("--config", required=True)

    sub.add_parser("list", help="list bundled experiment configs")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = apply_overrides(load_config(args.config), runs=args.runs, seed=args.seed, out=args.out, render=args.render)
    result = run_experiment(cfg, workers=args.workers, executor=args.executor)
    print(result.out_dir)
    for artifact in list_artifacts(result.out_dir):
        print(f"  {artifact['name']}\t{artifact['type']}\t{artifact['size']}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    print(f"{cfg.name}: ok (target={cfg.target.kind} d={cfg.target.dim} sampler={cfg.sampler} runs={cfg.runs})")
    return 0


def _cmd_list(_args: argparse.Namespace) -> int:
    for name in list_bundled():
        print(name)
    return 0


COMMANDS = {"run": _cmd_run, "validate": _cmd_validate, "list": _cmd_list}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or get_settings().log_level)
    logger.debug(f"settings: {settings_diagnostics()}")
    try:
        return COMMANDS[args.cmd](args)
    except AGMError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
