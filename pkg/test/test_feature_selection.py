# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Test homogenisation, the penalised logistic fit and feature ranking"""

import numpy as np
import pytest

from drlssv.common import ModelError
from drlssv.utils.feature_selection import (FeatureSelection, HomogenizedSet, LogisticConfig, LogisticModel,
                                            build_pools, fit_logistic, homogenize, log_likelihood, score,
                                            select_features)
from drlssv.utils.ingestion import POLLUTANTS


def grid_search(design, labels, ridge):
    """Zooming 2-D grid search of the penalised log-likelihood of a one-feature model."""
    center = np.zeros(2)
    half = 5.0
    for _ in range(6):
        alphas = center[0] + np.linspace(-half, half, 81)
        betas = center[1] + np.linspace(-half, half, 81)
        alpha_grid, beta_grid = np.meshgrid(alphas, betas, indexing='ij')
        eta = alpha_grid[..., np.newaxis] + beta_grid[..., np.newaxis] * design[:, 0]
        values = np.sum(labels * eta - np.logaddexp(0.0, eta), axis=-1) - 0.5 * ridge * beta_grid**2
        i, j = np.unravel_index(np.argmax(values), values.shape)
        center = np.array([alphas[i], betas[j]])
        half /= 8.0
    return center


def test_homogenize_labels():
    samples = homogenize(np.ones((2, 7)), np.zeros((3, 7)))
    assert len(samples) == 5
    assert samples.labels.tolist() == [0, 0, 1, 1, 1]
    assert samples.n_hourly == 2
    assert samples.n_daily == 3
    assert samples[4].label == 1
    assert samples[0].features.tolist() == [1.0] * 7
    assert len(homogenize(np.ones((100, 7)), np.ones((50, 7)))) == 150


def test_homogenize_empty_pool():
    with pytest.raises(ModelError):
        homogenize(np.ones((2, 7)), np.zeros((0, 7)))


def test_homogenize_constant_feature_sd():
    features = np.arange(35, dtype=float).reshape(5, 7)
    features[:, 2] = 4.0
    samples = homogenize(features[:2], features[2:])
    assert samples.feature_sds[2] == 1.0
    assert not samples.standardized[:, 2].any()


def test_log_likelihood_at_origin():
    value = log_likelihood(0.0, np.zeros(2), np.ones((4, 2)), [0, 1, 0, 1])
    assert value == pytest.approx(-2.7725887, abs=1e-7)


def test_log_likelihood_matches_per_sample_sum():
    rng = np.random.default_rng(5)
    features = rng.normal(size=(10, 3))
    labels = rng.integers(0, 2, size=10)
    alpha, beta, ridge = 0.3, np.array([0.5, -1.2, 2.0]), 0.1
    expected = 0.0
    for row, label in zip(features, labels):
        prob = 1.0 / (1.0 + np.exp(-(alpha + row @ beta)))
        expected += label * np.log(prob) + (1 - label) * np.log(1.0 - prob)
    expected -= 0.5 * ridge * beta @ beta
    assert log_likelihood(alpha, beta, features, labels, ridge) == pytest.approx(expected, abs=1e-12)


def test_log_likelihood_saturated_is_finite():
    value = log_likelihood(0.0, np.array([1000.0]), np.array([[1.0], [-1.0]]), [0, 1])
    assert np.isfinite(value)
    assert value == pytest.approx(-2000.0 - 0.5e-4 * 1e6)


def test_score_balanced_labels():
    d_alpha, _ = score(0.0, np.zeros(2), np.random.default_rng(0).normal(size=(4, 2)), [1, 1, 0, 0])
    assert d_alpha == 0.0


def test_score_constant_column_matches_intercept():
    rng = np.random.default_rng(6)
    features = np.column_stack([rng.normal(size=8), np.ones(8)])
    d_alpha, d_beta = score(0.2, np.array([0.7, 0.0]), features, rng.integers(0, 2, size=8), ridge=0.0)
    assert d_beta[1] == pytest.approx(d_alpha, abs=1e-12)


def test_score_matches_finite_differences():
    rng = np.random.default_rng(7)
    features = rng.normal(size=(12, 3))
    labels = rng.integers(0, 2, size=12)
    alpha, beta, ridge, step = -0.4, np.array([0.3, 0.8, -0.5]), 0.05, 1e-6
    d_alpha, d_beta = score(alpha, beta, features, labels, ridge)
    numeric_alpha = (log_likelihood(alpha + step, beta, features, labels, ridge) -
                     log_likelihood(alpha - step, beta, features, labels, ridge)) / (2 * step)
    assert d_alpha == pytest.approx(numeric_alpha, rel=1e-5)
    for j in range(3):
        shift = np.zeros(3)
        shift[j] = step
        numeric = (log_likelihood(alpha, beta + shift, features, labels, ridge) -
                   log_likelihood(alpha, beta - shift, features, labels, ridge)) / (2 * step)
        assert d_beta[j] == pytest.approx(numeric, rel=1e-5)


def test_fit_independent_features():
    """Every row appears once in the hourly pool and twice in the daily pool: p = 2/3 everywhere."""
    pool = np.random.default_rng(8).normal(size=(100, 7))
    model = fit_logistic(homogenize(pool, np.vstack([pool, pool])))
    assert model.converged
    assert model.standardized_alpha == pytest.approx(np.log(2.0), abs=1e-3)
    np.testing.assert_allclose(model.standardized_beta, 0.0, atol=1e-3)


def test_fit_optimum_has_small_score():
    rng = np.random.default_rng(9)
    hourly = rng.normal(size=(60, 7))
    daily = rng.normal(loc=0.5, size=(40, 7))
    samples = homogenize(hourly, daily)
    model = fit_logistic(samples)
    assert model.converged
    d_alpha, d_beta = score(model.standardized_alpha, model.standardized_beta, samples.standardized, samples.labels,
                            LogisticConfig().ridge)
    assert max(abs(d_alpha), np.max(np.abs(d_beta))) < 1e-8
    assert list(model.history) == sorted(model.history)


def test_fit_matches_grid_search():
    names = ('PM10', )
    hourly = np.array([[0.1], [0.5], [0.9]])
    daily = np.array([[0.3], [0.7], [1.1]])
    samples = homogenize(hourly, daily, feature_names=names)
    model = fit_logistic(samples, LogisticConfig(ridge=1e-4))
    assert model.converged
    alpha, beta = grid_search(samples.standardized, samples.labels, 1e-4)
    assert model.standardized_alpha == pytest.approx(alpha, abs=1e-3)
    assert model.standardized_beta[0] == pytest.approx(beta, abs=1e-3)


def test_fit_separable_is_finite():
    samples = homogenize(np.array([[0.0], [1.0], [2.0]]), np.array([[5.0], [6.0], [7.0]]), feature_names=('CO', ))
    model = fit_logistic(samples, LogisticConfig(max_iter=200, ridge=1e-2))
    assert model.converged
    assert np.isfinite(model.beta).all()
    assert model.standardized_beta[0] > 0
    alpha, beta = grid_search(samples.standardized, samples.labels, 1e-2)
    assert model.standardized_beta[0] == pytest.approx(beta, abs=1e-3)
    assert model.standardized_alpha == pytest.approx(alpha, abs=1e-3)


def test_fit_single_label():
    samples = homogenize(np.ones((2, 7)), np.ones((1, 7)))
    samples.labels[:] = 1.0
    with pytest.raises(ModelError):
        fit_logistic(samples)


def test_fit_not_converged():
    rng = np.random.default_rng(10)
    samples = homogenize(rng.normal(size=(30, 7)), rng.normal(loc=1.0, size=(30, 7)))
    model = fit_logistic(samples, LogisticConfig(max_iter=1))
    assert not model.converged
    assert model.iterations == 1
    with pytest.raises(ModelError):
        select_features(model)


def _model(standardized_beta):
    return LogisticModel(alpha=0.0,
                         beta=np.asarray(standardized_beta, dtype=float),
                         iterations=1,
                         converged=True,
                         feature_means=np.zeros(7),
                         feature_sds=np.ones(7))


def test_select_single_dominant():
    selection = select_features(_model([0, 0, 0, 0, 0, 0, 1]), k=3)
    assert selection.selected == ('O3', 'PM2.5', 'PM10')
    assert selection.scores[0] == 1.0


def test_select_all():
    selection = select_features(_model([0.3, -2.0, 0.1, 0.0, 5.0, -0.2, 1.0]), k=7)
    assert selection.selected == ('NH3', 'PM10', 'O3', 'PM2.5', 'CO', 'SO2', 'NOx')
    assert set(selection.selected) == set(POLLUTANTS)


def test_select_uses_standardized_magnitude():
    model = LogisticModel(alpha=0.0,
                          beta=np.array([1.0, 0.01, 0, 0, 0, 0, 0]),
                          iterations=1,
                          converged=True,
                          feature_means=np.zeros(7),
                          feature_sds=np.array([1.0, 1000.0, 1, 1, 1, 1, 1]))
    assert select_features(model, k=1).selected == ('PM10', )


def test_select_bad_k():
    with pytest.raises(ModelError):
        select_features(_model(np.ones(7)), k=0)
    with pytest.raises(ModelError):
        select_features(_model(np.ones(7)), k=8)


def test_selection_invariants():
    with pytest.raises(ValueError):
        FeatureSelection(ranked=('CO', 'O3'), selected=('O3', ), scores=(2.0, 1.0))
    with pytest.raises(ValueError):
        FeatureSelection(ranked=('CO', 'O3'), selected=('CO', ), scores=(1.0, 2.0))


def shifted_pools(seed):
    """Hourly and daily pools whose means differ by a distinct amount per pollutant."""
    rng = np.random.default_rng(seed)
    shift = np.array([0.05, 0.9, 0.0, 0.2, 0.0, 0.5, 0.7])
    return rng.normal(size=(120, 7)), rng.normal(loc=shift, size=(60, 7))


@pytest.mark.parametrize('column,factor', [(1, 1000.0), (5, 1e-3), (0, 7.5)])
def test_selection_ignores_column_scale(column, factor):
    hourly, daily = shifted_pools(11)
    reference = select_features(fit_logistic(homogenize(hourly, daily)), k=3)
    hourly[:, column] *= factor
    daily[:, column] *= factor
    rescaled = select_features(fit_logistic(homogenize(hourly, daily)), k=3)
    assert rescaled.ranked == reference.ranked
    np.testing.assert_allclose(rescaled.scores, reference.scores, rtol=1e-9, atol=1e-12)


def test_fit_ignores_sample_order():
    samples = homogenize(*shifted_pools(12))
    order = np.random.default_rng(13).permutation(len(samples))
    shuffled = HomogenizedSet(samples.features[order], samples.labels[order])
    model = fit_logistic(samples)
    reordered = fit_logistic(shuffled)
    assert reordered.iterations == model.iterations
    assert reordered.alpha == pytest.approx(model.alpha, abs=1e-10)
    np.testing.assert_allclose(reordered.beta, model.beta, atol=1e-10)
    assert select_features(reordered).ranked == select_features(model).ranked


def test_build_pools_daily_means(small_dataset):
    hourly, daily = build_pools(small_dataset.hourly)
    assert hourly.shape == (3 * 20 * 24, 7)
    assert daily.shape == (3 * 20, 7)
    np.testing.assert_allclose(daily[0], small_dataset.hourly[0].readings[:24].mean(axis=0))
    _, native = build_pools(small_dataset.hourly, small_dataset.daily)
    assert native.shape == (3 * 20, 7)
