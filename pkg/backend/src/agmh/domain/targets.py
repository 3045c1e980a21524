#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
目标分布：采样器只看到未归一化对数密度 log p(x)。

内置两类目标（四次双峰、Gaussian 混合）以及求积 oracle，
后者给出 d ≤ 2 时的归一化常数、均值与协方差真值。
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..core.errors import DimensionError, QuadratureConvergenceError
from .gaussmix import (
    CovarianceMatrix,
    GaussianComponent,
    MixtureProposal,
    as_points,
    as_vector,
    mixture_log_density_batch,
)

logger = logging.getLogger(__name__)

# 每轴网格点数（加密前）
DEFAULT_GRID = {1: 2001, 2: 301}


@dataclass(frozen=True, eq=False)
class Box:
    """轴对齐盒子 [lower_k, upper_k]。"""
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def from_bounds(cls, bounds: Sequence[Sequence[float]]) -> "Box":
        b = np.asarray(bounds, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2:
            raise DimensionError(f"box bounds must be [[lo, hi], ...], got shape {b.shape}")
        if np.any(b[:, 0] >= b[:, 1]):
            raise ValueError(f"empty box: {b.tolist()}")
        return cls(lower=b[:, 0].copy(), upper=b[:, 1].copy())

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.all((points >= self.lower) & (points <= self.upper), axis=-1)

    def uniform(self, rng: np.random.Generator) -> np.ndarray:
        return self.lower + (self.upper - self.lower) * rng.random(self.dim)


class TargetModel(ABC):
    """未归一化目标 p(x)，support 为 None 表示整个 R^d。"""

    name: str = "target"

    def __init__(self, dim: int, support: Optional[Box] = None):
        if dim < 1:
            raise DimensionError(f"target dimension must be positive, got {dim}")
        if support is not None and support.dim != dim:
            raise DimensionError("support box dimension mismatch", expected=dim, got=support.dim)
        self.dim = dim
        self.support = support

    @abstractmethod
    def _log_density(self, points: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def default_box(self) -> Box:
        """几乎包含全部质量的盒子，用于求积 oracle。"""

    def log_density_batch(self, points) -> np.ndarray:
        p = as_points(points, self.dim)
        out = self._log_density(p)
        if self.support is not None:
            out = np.where(self.support.contains(p), out, -np.inf)
        return out

    def log_density(self, x) -> float:
        v = as_vector(x, self.dim)
        return float(self.log_density_batch(v[None, :])[0])


class QuarticBimodalTarget(TargetModel):
    """log p(x) = −(x²−4)²/4，峰值在 x = ±2。"""

    name = "quartic_bimodal"

    def __init__(self):
        super().__init__(dim=1)

    def _log_density(self, points: np.ndarray) -> np.ndarray:
        x = points[:, 0]
        return -((x * x - 4.0) ** 2) / 4.0

    def default_box(self) -> Box:
        return Box.from_bounds([[-6.0, 6.0]])


@dataclass(frozen=True, eq=False)
class MixtureTargetSpec:
    weights: np.ndarray
    means: np.ndarray
    covariances: Tuple[CovarianceMatrix, ...]

    @classmethod
    def create(cls, weights, means, covariances) -> "MixtureTargetSpec":
        w = np.asarray(weights, dtype=float)
        mu = np.atleast_2d(np.asarray(means, dtype=float))
        if mu.shape[0] != w.shape[0] and w.shape[0] == mu.shape[1] and mu.shape[0] == 1:
            mu = mu.T
        covs = []
        for c in covariances:
            arr = np.asarray(c, dtype=float)
            # 1-D 情形允许直接给方差 ρ²
            covs.append(CovarianceMatrix.from_array(arr.reshape(1, 1) if arr.size == 1 else arr))
        if len(covs) != w.shape[0] or mu.shape[0] != w.shape[0]:
            raise DimensionError(
                f"mixture target needs matching lengths: {w.shape[0]} weights, "
                f"{mu.shape[0]} means, {len(covs)} covariances"
            )
        for i, c in enumerate(covs):
            if c.dim != mu.shape[1]:
                raise DimensionError(f"covariance {i} is {c.dim}x{c.dim} but means have length {mu.shape[1]}", expected=mu.shape[1], got=c.dim)
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError(f"mixture target weights must be nonnegative and sum to 1: {w.tolist()}")
        return cls(weights=w, means=mu, covariances=tuple(covs))

    def as_mixture(self) -> MixtureProposal:
        comps = [GaussianComponent.create(m, c) for m, c in zip(self.means, self.covariances)]
        return MixtureProposal.create(self.weights, comps)


class GaussianMixtureTarget(TargetModel):
    """Σ a_i N(x|η_i, Σ_i)，已归一化，Z = 1。"""

    name = "gaussian_mixture"

    def __init__(self, spec: MixtureTargetSpec):
        self.spec = spec
        self.mixture = spec.as_mixture()
        super().__init__(dim=self.mixture.dim)

    def _log_density(self, points: np.ndarray) -> np.ndarray:
        return mixture_log_density_batch(points, self.mixture)

    def default_box(self) -> Box:
        sd = np.sqrt(np.stack([np.diag(c.entries) for c in self.spec.covariances]))
        lo = np.min(self.spec.means - 10.0 * sd, axis=0)
        hi = np.max(self.spec.means + 10.0 * sd, axis=0)
        return Box(lower=lo, upper=hi)


def quartic_bimodal() -> TargetModel:
    return QuarticBimodalTarget()


def gaussian_mixture_target(spec: MixtureTargetSpec) -> TargetModel:
    return GaussianMixtureTarget(spec)


@dataclass(frozen=True, eq=False)
class QuadratureResult:
    z: float
    mean: np.ndarray
    cov: CovarianceMatrix


def _grid_moments(t: TargetModel, box: Box, n: int) -> Tuple[float, np.ndarray, np.ndarray]:
    axes = [np.linspace(lo, hi, n) for lo, hi in zip(box.lower, box.upper)]
    if t.dim == 1:
        x = axes[0]
        lp = t.log_density_batch(x[:, None])
        shift = np.max(lp)
        dens = np.exp(lp - shift)
        z = trapezoid(dens, x)
        mean = trapezoid(dens * x, x) / z
        var = trapezoid(dens * (x - mean) ** 2, x) / z
        return float(z * np.exp(shift)), np.array([mean]), np.array([[var]])

    gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    lp = t.log_density_batch(pts).reshape(gx.shape)
    shift = np.max(lp)
    dens = np.exp(lp - shift)

    def integrate(f: np.ndarray) -> float:
        return float(trapezoid(trapezoid(f, axes[1], axis=1), axes[0]))

    z = integrate(dens)
    mx = integrate(dens * gx) / z
    my = integrate(dens * gy) / z
    dx, dy = gx - mx, gy - my
    cxx = integrate(dens * dx * dx) / z
    cyy = integrate(dens * dy * dy) / z
    cxy = integrate(dens * dx * dy) / z
    return float(z * np.exp(shift)), np.array([mx, my]), np.array([[cxx, cxy], [cxy, cyy]])


def quadrature_moments(t: TargetModel, box: Optional[Box] = None, grid: Optional[int] = None, tol: float = 1e-8) -> QuadratureResult:
    """梯形法估计 Z、均值、协方差；网格加密一倍后变化须小于 tol。"""
    grid = grid or DEFAULT_GRID.get(t.dim, 301)
    if t.dim > 2:
        raise DimensionError("quadrature oracle supports d <= 2 only", expected=2, got=t.dim)
    box = box or t.default_box()
    if box.dim != t.dim:
        raise DimensionError("quadrature box dimension mismatch", expected=t.dim, got=box.dim)
    if grid < 3:
        raise ValueError(f"grid must have at least 3 points per axis, got {grid}")

    coarse = _grid_moments(t, box, grid)
    fine = _grid_moments(t, box, 2 * grid - 1)

    def _delta(a, b) -> float:
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))

    worst = max(_delta(c, f) for c, f in zip(coarse, fine))
    if not np.isfinite(worst) or worst >= tol:
        raise QuadratureConvergenceError(
            f"quadrature for {t.name} did not converge on {grid} points: change {worst:.3e} >= {tol:.1e}",
            coarse={"z": coarse[0], "mean": coarse[1].tolist()},
            fine={"z": fine[0], "mean": fine[1].tolist()},
        )
    z, mean, cov = fine
    logger.debug(f"quadrature {t.name}: Z={z:.12g} mean={mean.tolist()} (grid {2 * grid - 1})")
    return QuadratureResult(z=z, mean=mean, cov=CovarianceMatrix.from_array(cov))
