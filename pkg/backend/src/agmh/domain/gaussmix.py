#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
高斯与高斯混合的稠密计算：采样、对数密度、Cholesky 分解。

所有密度均为归一化形式（含 (2π)^(-d/2)|C|^(-1/2) 常数），混合权重才有可比性；
对数域计算，仅在接受率中取指数。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from ..core.errors import AGMError, DimensionError, NonFiniteInputError, NotPositiveDefiniteError, NotSymmetricError

_LOG_2PI = math.log(2.0 * math.pi)
_WEIGHT_TOL = 1e-12
SYMMETRY_TOL = 1e-12
# 行数不超过该值时用 numpy 直接做平移求和（逐步接受率只有两行）
_SMALL_BATCH = 16


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected length {dim}, got {v.shape[0]}", expected=dim, got=v.shape[0])
    if not np.all(np.isfinite(v)):
        raise NonFiniteInputError(f"non-finite entries in {v}")
    return v


def as_points(points, dim: int) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim == 1 and dim == 1:
        p = p[:, None]
    if p.ndim != 2 or p.shape[1] != dim:
        raise DimensionError(f"expected (n, {dim}) points, got shape {p.shape}", expected=dim)
    return p


def cholesky(cov) -> Optional[np.ndarray]:
    """下三角因子 L（L·Lᵀ = cov）；非正定时返回 None 而不是抛异常。"""
    a = np.atleast_2d(np.asarray(cov, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"cholesky needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        return None
    try:
        return linalg.cholesky(a, lower=True, check_finite=False)
    except linalg.LinAlgError:
        return None


def asymmetry(a: np.ndarray) -> float:
    """max|C − Cᵀ| / max|C|。"""
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - a.T))) / scale


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    entries: np.ndarray
    chol: np.ndarray

    @classmethod
    def from_array(cls, cov) -> "CovarianceMatrix":
        a = np.atleast_2d(np.array(cov, dtype=float))
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"covariance must be a square matrix, got shape {a.shape}")
        # scipy 的 Cholesky 只读下三角，非对称输入必须在这里拒绝
        skew = asymmetry(a)
        if skew > SYMMETRY_TOL:
            raise NotSymmetricError(f"covariance is not symmetric (relative asymmetry {skew:.3e})", asymmetry=skew, matrix=a)
        L = cholesky(a)
        if L is None:
            raise NotPositiveDefiniteError("covariance is not positive definite", matrix=a)
        a.setflags(write=False)
        L.setflags(write=False)
        return cls(entries=a, chol=L)

    @classmethod
    def isotropic(cls, dim: int, sigma2: float) -> "CovarianceMatrix":
        return cls.from_array(sigma2 * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def chol_inv(self) -> np.ndarray:
        return linalg.solve_triangular(self.chol, np.eye(self.dim), lower=True, check_finite=False)

    @cached_property
    def log_det(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.chol))))


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    mean: np.ndarray
    cov: CovarianceMatrix
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise AGMError(f"component count must be >= 1, got {self.count}")
        if self.mean.shape != (self.cov.dim,):
            raise DimensionError(
                f"mean length {self.mean.shape} does not match covariance dim {self.cov.dim}",
                expected=self.cov.dim, got=self.mean.shape[0],
            )

    @classmethod
    def create(cls, mean, cov, count: int = 1) -> "GaussianComponent":
        m = as_vector(mean).copy()
        m.setflags(write=False)
        c = cov if isinstance(cov, CovarianceMatrix) else CovarianceMatrix.from_array(cov)
        return cls(mean=m, cov=c, count=int(count))

    @property
    def dim(self) -> int:
        return self.cov.dim


@dataclass(frozen=True, eq=False)
class MixtureProposal:
    weights: np.ndarray
    components: Tuple[GaussianComponent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        w = self.weights
        if len(self.components) < 1:
            raise AGMError("a mixture needs at least one component")
        if w.shape != (len(self.components),):
            raise DimensionError(
                f"{w.shape[0]} weights for {len(self.components)} components",
                expected=len(self.components), got=w.shape[0],
            )
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise AGMError(f"weights must be finite and nonnegative: {w}")
        if abs(float(w.sum()) - 1.0) > _WEIGHT_TOL:
            raise AGMError(f"weights must sum to 1, got {float(w.sum())!r}")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise DimensionError(f"components disagree on dimension: {sorted(dims)}")

    @classmethod
    def create(cls, weights, components: Sequence[GaussianComponent]) -> "MixtureProposal":
        w = np.array(weights, dtype=float)
        w.setflags(write=False)
        return cls(weights=w, components=tuple(components))

    @classmethod
    def _unchecked(cls, weights: np.ndarray, components: Tuple[GaussianComponent, ...]) -> "MixtureProposal":
        # 采样器内部逐步替换分量时使用，调用方保证权重与维度合法
        obj = cls.__new__(cls)
        object.__setattr__(obj, "weights", weights)
        object.__setattr__(obj, "components", components)
        return obj

    @classmethod
    def uniform(cls, means, sigma2: float) -> "MixtureProposal":
        """w = 1/N，C_i = σ²·I_d。"""
        means = np.atleast_2d(np.asarray(means, dtype=float))
        n, d = means.shape
        cov = CovarianceMatrix.isotropic(d, sigma2)
        comps = [GaussianComponent.create(m, cov) for m in means]
        return cls.create(np.full(n, 1.0 / n), comps)

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @cached_property
    def means(self) -> np.ndarray:
        return np.stack([c.mean for c in self.components])

    @cached_property
    def counts(self) -> np.ndarray:
        return np.array([c.count for c in self.components], dtype=np.int64)

    @cached_property
    def _cumulative(self) -> np.ndarray:
        return np.cumsum(self.weights)

    @cached_property
    def _positive(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    @cached_property
    def _last_positive(self) -> int:
        return int(self._positive[-1])

    @cached_property
    def _chol_inv_stack(self) -> np.ndarray:
        return np.stack([c.cov.chol_inv for c in self.components])

    @cached_property
    def _log_norm(self) -> np.ndarray:
        return np.array([-0.5 * (c.dim * _LOG_2PI + c.cov.log_det) for c in self.components])

    def replace(self, j: int, component: GaussianComponent, weights=None) -> "MixtureProposal":
        """替换第 j 个分量（可同时换权重）；不重新校验整个混合。"""
        if component.dim != self.dim:
            raise DimensionError("replacement component dimension mismatch", expected=self.dim, got=component.dim)
        comps = list(self.components)
        comps[j] = component
        if weights is None:
            w = self.weights
        else:
            w = np.array(weights, dtype=float)
            w.setflags(write=False)
        return MixtureProposal._unchecked(w, tuple(comps))


def gaussian_log_density_batch(points, g: GaussianComponent) -> np.ndarray:
    p = as_points(points, g.dim)
    z = linalg.solve_triangular(g.cov.chol, (p - g.mean).T, lower=True, check_finite=False)
    return -0.5 * (g.dim * _LOG_2PI + g.cov.log_det) - 0.5 * np.einsum("ji,ji->i", z, z)


def gaussian_log_density(x, g: GaussianComponent) -> float:
    v = as_vector(x, g.dim)
    return float(gaussian_log_density_batch(v[None, :], g)[0])


def _component_table(points: np.ndarray, q: MixtureProposal) -> np.ndarray:
    if points.shape[0] > _SMALL_BATCH:
        return np.stack([gaussian_log_density_batch(points, c) for c in q.components], axis=-1)
    diff = points[:, None, :] - q.means[None, :, :]
    z = np.einsum("nij,pnj->pni", q._chol_inv_stack, diff)
    return q._log_norm - 0.5 * np.einsum("pni,pni->pn", z, z)


def mixture_log_density_batch(points, q: MixtureProposal) -> np.ndarray:
    if q._positive.size == 0:
        raise AGMError("mixture has all-zero weights")
    p = as_points(points, q.dim)
    table = _component_table(p, q)
    if p.shape[0] > _SMALL_BATCH:
        # logsumexp 内部按最大值平移
        return logsumexp(table, axis=-1, b=q.weights)
    live = table[:, q._positive]
    top = live.max(axis=-1)
    top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        return top + np.log(np.exp(live - top[:, None]) @ q.weights[q._positive])


def mixture_log_density(x, q: MixtureProposal) -> float:
    v = as_vector(x, q.dim)
    return float(mixture_log_density_batch(v[None, :], q)[0])


def _pick_component(q: MixtureProposal, u: np.ndarray) -> np.ndarray:
    k = np.searchsorted(q._cumulative, u, side="right")
    return np.minimum(k, q._last_positive)


def mixture_sample(q: MixtureProposal, rng: np.random.Generator) -> np.ndarray:
    """一次分类抽样 + d 个标准正态：x = μ_k + L_k·z。"""
    k = int(_pick_component(q, rng.random()))
    z = rng.standard_normal(q.dim)
    comp = q.components[k]
    return comp.mean + comp.cov.chol @ z


def mixture_sample_batch(q: MixtureProposal, rng: np.random.Generator, n: int) -> np.ndarray:
    ks = _pick_component(q, rng.random(n))
    z = rng.standard_normal((n, q.dim))
    out = np.empty((n, q.dim))
    for k, comp in enumerate(q.components):
        sel = ks == k
        if np.any(sel):
            out[sel] = comp.mean + z[sel] @ comp.cov.chol.T
    return out


def ellipse_descriptor(g: GaussianComponent) -> Tuple[np.ndarray, float]:
    """协方差椭圆：半轴长（特征值开方，大者在前）与主轴方向角。"""
    vals, vecs = np.linalg.eigh(g.cov.entries)
    order = np.argsort(vals)[::-1]
    axes = np.sqrt(np.clip(vals[order], 0.0, None))
    if g.dim < 2 or math.isclose(axes[0], axes[-1], rel_tol=1e-12, abs_tol=0.0):
        return axes, 0.0
    major = vecs[:, order[0]]
    angle = math.atan2(major[1], major[0])
    if angle <= -math.pi / 2:
        angle += math.pi
    elif angle > math.pi / 2:
        angle -= math.pi
    return axes, angle
