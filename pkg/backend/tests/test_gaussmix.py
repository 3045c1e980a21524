#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Gaussian / mixture primitives: densities, sampling, Cholesky, ellipses."""

import math
from decimal import Decimal, localcontext

import numpy as np
import pytest
from scipy import stats

from agmh.core.errors import AGMError, DimensionError, NonFiniteInputError, NotPositiveDefiniteError, NotSymmetricError
from agmh.domain.diagnostics import histogram_tv
from agmh.domain.gaussmix import (
    CovarianceMatrix,
    GaussianComponent,
    MixtureProposal,
    cholesky,
    ellipse_descriptor,
    gaussian_log_density,
    gaussian_log_density_batch,
    mixture_log_density,
    mixture_log_density_batch,
    mixture_sample,
    mixture_sample_batch,
)
from agmh.domain.targets import MixtureTargetSpec, gaussian_mixture_target


def test_standard_normal_log_density_at_origin():
    g = GaussianComponent.create([0.0, 0.0], np.eye(2))
    assert gaussian_log_density([0.0, 0.0], g) == pytest.approx(-math.log(2 * math.pi), abs=1e-14)


def test_log_density_matches_scipy():
    cov = np.array([[0.8, -0.3], [-0.3, 0.8]])
    g = GaussianComponent.create([0.0, 4.0], cov)
    pts = np.array([[0.0, 4.0], [1.0, 2.5], [-3.0, 7.0]])
    expected = stats.multivariate_normal(mean=[0.0, 4.0], cov=cov).logpdf(pts)
    np.testing.assert_allclose(gaussian_log_density_batch(pts, g), expected, rtol=1e-12)


def test_mixture_log_density_is_logsumexp_of_components():
    q = MixtureProposal.create(
        [0.25, 0.75],
        [GaussianComponent.create([-1.0], [[0.5]]), GaussianComponent.create([2.0], [[2.0]])],
    )
    x = 0.3
    expected = math.log(
        0.25 * stats.norm(-1.0, math.sqrt(0.5)).pdf(x) + 0.75 * stats.norm(2.0, math.sqrt(2.0)).pdf(x)
    )
    assert mixture_log_density([x], q) == pytest.approx(expected, rel=1e-12)


def test_mixture_log_density_far_tail_stays_finite():
    q = MixtureProposal.uniform([[0.0], [1.0]], 1.0)
    lp = mixture_log_density_batch(np.array([[200.0]]), q)
    assert np.isfinite(lp[0])
    assert lp[0] < -19000


def test_zero_weight_component_is_ignored_by_density_and_sampler(rng):
    far = GaussianComponent.create([100.0], [[1.0]])
    near = GaussianComponent.create([0.0], [[1.0]])
    q = MixtureProposal.create([0.0, 1.0], [far, near])
    assert mixture_log_density([0.0], q) == pytest.approx(gaussian_log_density([0.0], near), abs=1e-14)
    xs = mixture_sample_batch(q, rng, 500)
    assert np.all(np.abs(xs) < 10.0)


def test_cholesky_returns_none_for_indefinite_matrix():
    assert cholesky(np.array([[1.0, 2.0], [2.0, 1.0]])) is None
    assert cholesky(np.array([[np.nan]])) is None
    L = cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
    np.testing.assert_allclose(L @ L.T, [[4.0, 2.0], [2.0, 3.0]], rtol=1e-14)
    assert L[0, 1] == 0.0


def test_cholesky_rejects_non_square():
    with pytest.raises(DimensionError):
        cholesky(np.ones((2, 3)))


def test_covariance_from_array_raises_on_non_pd():
    with pytest.raises(NotPositiveDefiniteError):
        CovarianceMatrix.from_array([[1.0, 0.0], [0.0, -1.0]])


def test_component_validates_dimension_and_finiteness():
    with pytest.raises(DimensionError):
        GaussianComponent.create([0.0, 1.0, 2.0], np.eye(2))
    with pytest.raises(NonFiniteInputError):
        GaussianComponent.create([np.inf, 0.0], np.eye(2))


def test_mixture_weights_must_sum_to_one():
    comps = [GaussianComponent.create([0.0], [[1.0]])] * 2
    with pytest.raises(AGMError):
        MixtureProposal.create([0.5, 0.6], comps)
    with pytest.raises(AGMError):
        MixtureProposal.create([1.5, -0.5], comps)


def test_mixture_sample_consumes_d_plus_one_draws():
    q = MixtureProposal.uniform([[0.0, 0.0, 0.0], [5.0, 5.0, 5.0]], 2.0)
    a = np.random.default_rng(7)
    b = np.random.default_rng(7)
    mixture_sample(q, a)
    b.random()
    b.standard_normal(3)
    assert a.random() == b.random()


def test_mixture_sample_single_component_moments(rng):
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    q = MixtureProposal.create([1.0], [GaussianComponent.create([1.0, -1.0], cov)])
    xs = np.stack([mixture_sample(q, rng) for _ in range(20000)])
    np.testing.assert_allclose(xs.mean(axis=0), [1.0, -1.0], atol=0.05)
    np.testing.assert_allclose(np.cov(xs.T), cov, atol=0.08)


def test_mixture_sample_batch_component_frequencies(rng):
    q = MixtureProposal.create(
        [0.2, 0.8],
        [GaussianComponent.create([-50.0], [[1.0]]), GaussianComponent.create([50.0], [[1.0]])],
    )
    xs = mixture_sample_batch(q, rng, 20000)
    assert np.mean(xs[:, 0] < 0) == pytest.approx(0.2, abs=0.015)


def test_ellipse_descriptor_isotropic_has_zero_orientation():
    axes, angle = ellipse_descriptor(GaussianComponent.create([0.0, 0.0], np.eye(2)))
    np.testing.assert_allclose(axes, [1.0, 1.0])
    assert angle == 0.0


def test_ellipse_descriptor_orientation_of_correlated_covariance():
    axes, angle = ellipse_descriptor(GaussianComponent.create([0.0, 0.0], [[0.8, -0.3], [-0.3, 0.8]]))
    np.testing.assert_allclose(axes, [math.sqrt(1.1), math.sqrt(0.5)], rtol=1e-12)
    assert angle == pytest.approx(-math.pi / 4, abs=1e-12)
    axes, angle = ellipse_descriptor(GaussianComponent.create([0.0, 0.0], [[0.3, 0.1], [0.1, 0.3]]))
    assert angle == pytest.approx(math.pi / 4, abs=1e-12)
    axes, angle = ellipse_descriptor(GaussianComponent.create([0.0, 0.0], [[1.0, 0.0], [0.0, 4.0]]))
    assert angle == pytest.approx(math.pi / 2, abs=1e-12)


def test_gaussian_log_density_closed_forms():
    g1 = GaussianComponent.create([0.0], [[1.0]])
    assert gaussian_log_density([0.0], g1) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)
    g2 = GaussianComponent.create([0.0, 0.0], [[2.0, 0.0], [0.0, 2.0]])
    expected = -math.log(2 * math.pi) - 0.5 * math.log(4.0) - 0.25
    assert gaussian_log_density([1.0, 0.0], g2) == pytest.approx(expected, abs=1e-14)


def test_mixture_degenerate_cases():
    g = GaussianComponent.create([1.0, -1.0], [[2.0, 0.3], [0.3, 1.0]])
    h = GaussianComponent.create([5.0, 5.0], np.eye(2))
    x = [0.4, 0.2]
    same = MixtureProposal.create([0.5, 0.5], [g, g])
    assert mixture_log_density(x, same) == pytest.approx(gaussian_log_density(x, g), abs=1e-14)
    first = MixtureProposal.create([1.0, 0.0], [g, h])
    assert mixture_log_density(x, first) == pytest.approx(gaussian_log_density(x, g), abs=1e-14)


def test_mixture_log_density_against_decimal_sum():
    q = MixtureProposal.create(
        [0.5, 0.5],
        [GaussianComponent.create([-10.0], [[4.0]]), GaussianComponent.create([10.0], [[4.0]])],
    )
    with localcontext() as ctx:
        ctx.prec = 60
        norm_const = 1 / (Decimal(2) * Decimal(math.pi) * 4).sqrt()
        term = norm_const * (Decimal(-100) / Decimal(8)).exp()
        expected = float((Decimal("0.5") * term + Decimal("0.5") * term).ln())
    assert mixture_log_density([0.0], q) == pytest.approx(expected, rel=1e-13)


def test_cholesky_known_factors(rng):
    np.testing.assert_array_equal(cholesky(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), rtol=1e-15)
    a = rng.normal(size=(4, 4))
    m = a @ a.T + np.eye(4)
    L = cholesky(m)
    np.testing.assert_allclose(L @ L.T, m, atol=1e-10)


def test_near_degenerate_component_samples_cluster(rng):
    tight = GaussianComponent.create([3.0], [[1e-8]])
    wide = GaussianComponent.create([-3.0], [[1.0]])
    xs = mixture_sample_batch(MixtureProposal.create([1.0, 0.0], [tight, wide]), rng, 5000)
    assert np.max(np.abs(xs - 3.0)) < 1e-3
    assert np.var(xs) == pytest.approx(1e-8, rel=0.1)


def test_covariance_from_array_rejects_asymmetric_matrix():
    with pytest.raises(NotSymmetricError) as exc:
        CovarianceMatrix.from_array([[1.0, 5.0], [0.1, 1.0]])
    assert exc.value.asymmetry == pytest.approx(4.9 / 5.0)
    with pytest.raises(DimensionError):
        CovarianceMatrix.from_array(np.ones((2, 3)))


def test_covariance_entries_agree_with_factor():
    c = CovarianceMatrix.from_array([[0.8, -0.3], [-0.3, 0.8]])
    assert np.max(np.abs(c.entries - c.entries.T)) == 0.0
    np.testing.assert_allclose(c.chol @ c.chol.T, c.entries, rtol=1e-10)
    # 舍入级别的不对称可以接受
    near = np.array([[2.0, 0.5], [0.5 + 1e-15, 1.0]])
    assert CovarianceMatrix.from_array(near).dim == 2


def test_mixture_sample_histogram_matches_density(rng):
    weights, means, variances = [0.3, 0.7], [[-2.0], [1.5]], [0.5, 1.0]
    q = MixtureProposal.create(weights, [GaussianComponent.create(m, [[v]]) for m, v in zip(means, variances)])
    density = gaussian_mixture_target(MixtureTargetSpec.create(weights, means, variances))
    xs = np.array([mixture_sample(q, rng)[0] for _ in range(100_000)])
    assert histogram_tv(xs, density, -6.0, 6.0, bins=100) <= 0.02


def test_small_and_large_batches_agree(rng):
    q = MixtureProposal.create(
        [0.2, 0.0, 0.8],
        [
            GaussianComponent.create([0.0, 1.0], [[0.3, 0.1], [0.1, 0.3]]),
            GaussianComponent.create([40.0, 40.0], np.eye(2)),
            GaussianComponent.create([-2.0, 3.0], [[2.0, -0.4], [-0.4, 1.0]]),
        ],
    )
    pts = rng.normal(scale=3.0, size=(64, 2))
    large = mixture_log_density_batch(pts, q)
    small = np.concatenate([mixture_log_density_batch(pts[i:i + 2], q) for i in range(0, 64, 2)])
    np.testing.assert_allclose(small, large, rtol=1e-13, atol=1e-13)
    expected = stats.multivariate_normal([0.0, 1.0], [[0.3, 0.1], [0.1, 0.3]]).pdf(pts) * 0.2
    expected += stats.multivariate_normal([-2.0, 3.0], [[2.0, -0.4], [-0.4, 1.0]]).pdf(pts) * 0.8
    np.testing.assert_allclose(large, np.log(expected), rtol=1e-12)


def test_replace_swaps_one_component():
    q = MixtureProposal.uniform([[0.0], [1.0]], 1.0)
    g = GaussianComponent.create([5.0], [[2.0]], count=3)
    r = q.replace(1, g, [0.25, 0.75])
    assert r.components[1] is g and r.components[0] is q.components[0]
    np.testing.assert_array_equal(r.weights, [0.25, 0.75])
    assert not r.weights.flags.writeable
    assert mixture_log_density([5.0], r) > mixture_log_density([5.0], q)
    with pytest.raises(DimensionError):
        q.replace(0, GaussianComponent.create([0.0, 0.0], np.eye(2)))
