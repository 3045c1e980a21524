from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.concurrency import create_run_pool
from ..core.errors import AGMError, ConfigError
from ..core.settings import get_settings
from ..domain.diagnostics import RunSummary, alpha_trace_average, summarize_chain
from ..domain.gaussmix import MixtureProposal, ellipse_descriptor
from ..domain.ids import config_fingerprint, derive_run_seed
from ..domain.sampler.agm import run_chain
from ..domain.sampler.baseline import run_baseline_chain
from ..domain.schemas.config import ExperimentConfig
from ..domain.targets import quadrature_moments
from ..infrastructure.storage.output_writer import (
    check_writable,
    write_aggregate,
    write_summary,
    write_table,
    write_text,
)
from .config_service import dump_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    mean: np.ndarray
    z: float
    source: str


@dataclass(eq=False)
class ExperimentResult:
    config: ExperimentConfig
    out_dir: str
    truth: GroundTruth
    runs: List[RunSummary]
    aggregates: Dict[str, float]
    files: List[str] = field(default_factory=list)


def resolve_output_dir(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> str:
    """优先级：调用参数 > 配置 outputs.dir > <AppSettings.output_dir>/<name>。"""
    if out_dir:
        return out_dir
    if cfg.outputs.dir:
        return cfg.outputs.dir
    return os.path.join(get_settings().output_dir, cfg.name)


def resolve_truth(cfg: ExperimentConfig) -> GroundTruth:
    """配置中给出的真值优先；缺失部分由求积补齐（仅 d ≤ 2）。"""
    mean, z = cfg.truth.mean, cfg.truth.z
    if mean is not None and z is not None:
        return GroundTruth(mean=np.asarray(mean, dtype=float), z=float(z), source="config")
    target = cfg.target.build()
    grid = cfg.metrics.oracle_grid or get_settings().oracle_grid
    quad = quadrature_moments(target, box=cfg.metrics.box(), grid=grid)
    return GroundTruth(
        mean=quad.mean if mean is None else np.asarray(mean, dtype=float),
        z=quad.z if z is None else float(z),
        source="quadrature" if mean is None and z is None else "config+quadrature",
    )


def _execute_run(cfg: ExperimentConfig, run_id: int, seed: int, z_draws: int) -> RunSummary:
    # 进程池入口：每条链独立的目标、状态与随机流
    target = cfg.target.build()
    sampler_cfg = cfg.chain.model_copy(update={"seed": seed})
    rng = np.random.default_rng(seed)
    if cfg.sampler == "baseline":
        trace = run_baseline_chain(target, sampler_cfg, rng)
    else:
        trace = run_chain(target, sampler_cfg, rng)
    return summarize_chain(trace, target, z_draws, rng, run_id=run_id, seed=seed)


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def aggregate_runs(runs: Sequence[RunSummary], truth: GroundTruth) -> Dict[str, float]:
    """按 run_id 排序后用 fsum 求和，结果与运行完成顺序无关。"""
    ordered = sorted(runs, key=lambda r: r.run_id)
    if not ordered:
        raise AGMError("no completed runs to aggregate")
    d = truth.mean.shape[0]
    out: Dict[str, float] = {}
    for k in range(d):
        out[f"mse_mean_{k}"] = _mean([(float(r.mean_estimate[k]) - float(truth.mean[k])) ** 2 for r in ordered])
    out["mse_z"] = _mean([(r.z_estimate - truth.z) ** 2 for r in ordered])
    for k in range(d):
        out[f"mean_lag1_corr_{k}"] = _mean([float(r.lag1_corr[k]) for r in ordered])
    out["mean_accept_rate"] = _mean([r.accept_rate_overall for r in ordered])
    out["z_flagged_runs"] = float(sum(1 for r in ordered if r.z_flagged))
    out["runs"] = float(len(ordered))
    return out


def _summary_rows(runs: Sequence[RunSummary], d: int) -> List[Dict[str, Any]]:
    rows = []
    for r in runs:
        row: Dict[str, Any] = {"run_id": str(r.run_id), "seed": str(r.seed)}
        for k in range(d):
            row[f"mean_estimate_{k}"] = float(r.mean_estimate[k])
        row["z_estimate"] = float(r.z_estimate)
        for k in range(d):
            row[f"lag1_corr_{k}"] = float(r.lag1_corr[k])
        row["accept_rate"] = float(r.accept_rate_overall)
        rows.append(row)
    return rows


def _aggregate_row(runs: Sequence[RunSummary], d: int) -> Dict[str, Any]:
    row: Dict[str, Any] = {"run_id": "aggregate", "seed": ""}
    for k in range(d):
        row[f"mean_estimate_{k}"] = _mean([float(r.mean_estimate[k]) for r in runs])
    row["z_estimate"] = _mean([r.z_estimate for r in runs])
    for k in range(d):
        row[f"lag1_corr_{k}"] = _mean([float(r.lag1_corr[k]) for r in runs])
    row["accept_rate"] = _mean([r.accept_rate_overall for r in runs])
    return row


def proposal_rows(run_id: int, q: MixtureProposal) -> List[Dict[str, Any]]:
    """每个分量一行：权重、均值、按行展开的协方差、计数 m_i。"""
    rows = []
    for i, comp in enumerate(q.components):
        row: Dict[str, Any] = {"run_id": run_id, "component": i, "weight": float(q.weights[i])}
        for k in range(q.dim):
            row[f"mean_{k}"] = float(comp.mean[k])
        for r in range(q.dim):
            for c in range(q.dim):
                row[f"cov_{r}{c}"] = float(comp.cov.entries[r, c])
        row["count"] = int(comp.count)
        rows.append(row)
    return rows


def ellipse_rows(run_id: int, stage: str, q: MixtureProposal) -> List[Dict[str, Any]]:
    rows = []
    for i, comp in enumerate(q.components):
        axes, angle = ellipse_descriptor(comp)
        row: Dict[str, Any] = {"run_id": run_id, "stage": stage, "component": i, "weight": float(q.weights[i])}
        for k in range(q.dim):
            row[f"mean_{k}"] = float(comp.mean[k])
        row["axis_major"] = float(axes[0])
        row["axis_minor"] = float(axes[1]) if axes.shape[0] > 1 else float("nan")
        row["orientation"] = float(angle)
        rows.append(row)
    return rows


def emit_plot_data(results: Sequence[RunSummary], out_dir: str) -> List[str]:
    """
    作图数据：
    - alpha_trace.csv：t（1 起）与各次运行逐步平均的 α
    - ellipses.csv：每次运行初始 (t=0) 与最终 (t=T_tot) 提议分布的椭圆描述
    """
    ordered = sorted(results, key=lambda r: r.run_id)
    alpha_mean = alpha_trace_average([r.alpha_trace for r in ordered])
    files = [
        write_table(
            out_dir,
            "alpha_trace.csv",
            ({"t": t + 1, "alpha_mean": float(a)} for t, a in enumerate(alpha_mean)),
            columns=["t", "alpha_mean"],
        )
    ]
    rows: List[Dict[str, Any]] = []
    for r in ordered:
        if r.initial_proposal is not None:
            rows.extend(ellipse_rows(r.run_id, "initial", r.initial_proposal))
        rows.extend(ellipse_rows(r.run_id, "final", r.final_proposal))
    files.append(write_table(out_dir, "ellipses.csv", rows))
    return files


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: Optional[str] = None,
    workers: Optional[int] = None,
    executor: Optional[str] = None,
    render: Optional[bool] = None,
) -> ExperimentResult:
    """
    执行 cfg.runs 条独立链并写出结果文件。

    输出目录与真值在任何链启动前确定；目录不可写或求积不收敛时直接失败。
    每条链的种子由 master_seed 与 run_id 派生，因此结果与 worker 数、完成顺序无关。
    """
    settings = get_settings()
    target_dir = resolve_output_dir(cfg, out_dir)
    try:
        check_writable(target_dir)
    except OSError as e:
        raise ConfigError(f"output directory {target_dir} is not usable: {e}", source=target_dir, original_error=e)

    truth = resolve_truth(cfg)
    z_draws = cfg.metrics.z_draws or settings.z_draws
    seeds = [derive_run_seed(cfg.master_seed, r) for r in range(cfg.runs)]
    logger.info(
        f"experiment '{cfg.name}' start | sampler={cfg.sampler} runs={cfg.runs} t_tot={cfg.chain.t_tot} "
        f"N={cfg.chain.components} d={cfg.target.dim} truth={truth.source} "
        f"fingerprint={config_fingerprint(cfg.model_dump(mode='json'))}"
    )

    started = time.perf_counter()
    results: List[RunSummary] = []
    with create_run_pool(cfg.runs, max_workers=workers, executor=executor) as pool:
        futures = {pool.submit(_execute_run, cfg, r, seeds[r], z_draws): r for r in range(cfg.runs)}
        step = max(1, cfg.runs // 10)
        for fut in as_completed(futures):
            results.append(fut.result())
            if len(results) % step == 0 or len(results) == cfg.runs:
                logger.info(f"experiment '{cfg.name}': {len(results)}/{cfg.runs} runs done")
    results.sort(key=lambda r: r.run_id)

    d = cfg.target.dim
    aggregates = aggregate_runs(results, truth)
    files = [
        write_summary(target_dir, _summary_rows(results, d), _aggregate_row(results, d)),
        write_aggregate(target_dir, aggregates),
        write_table(target_dir, "proposals.csv", [row for r in results for row in proposal_rows(r.run_id, r.final_proposal)]),
        write_text(target_dir, "config.resolved.yaml", dump_config(cfg)),
    ]
    files.extend(emit_plot_data(results, target_dir))

    if cfg.outputs.render if render is None else render:
        from ..infrastructure.plotting.figures import render_figures

        files.extend(render_figures(target_dir, cfg.target.build()))

    logger.info(
        f"experiment '{cfg.name}' finished in {time.perf_counter() - started:.1f}s | "
        f"mse_z={aggregates['mse_z']:.3e} accept={aggregates['mean_accept_rate']:.3f} -> {target_dir}"
    )
    return ExperimentResult(config=cfg, out_dir=target_dir, truth=truth, runs=results, aggregates=aggregates, files=files)
