# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Penalised maximum-likelihood logistic model over the hourly/daily pools and feature ranking"""

import logging
from collections import namedtuple
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import expit

from drlssv.common import ModelError
from drlssv.utils.ingestion import POLLUTANTS

LOGGER = logging.getLogger(__name__)

DEFAULT_RIDGE = 1e-4
DEFAULT_K = 3
MAX_HALVINGS = 50

HomogenizedSample = namedtuple('HomogenizedSample', 'features label')


class HomogenizedSet(Sequence):
    """Hourly-pool rows (label 0) followed by daily-pool rows (label 1).

    Standardisation statistics are computed over the union of both pools; a feature with zero
    spread gets a standard deviation of 1.
    """

    def __init__(self, features, labels, feature_names=POLLUTANTS):
        self.features = np.array(features, dtype=float)
        self.labels = np.array(labels, dtype=float)
        self.feature_names = tuple(feature_names)
        if self.features.ndim != 2 or self.features.shape[1] != len(self.feature_names):
            raise ModelError('expected one feature column per name in {}'.format(self.feature_names))
        if len(self.labels) != len(self.features):
            raise ModelError('one label per sample expected')
        if not np.isfinite(self.features).all():
            raise ModelError('homogenized features must be finite')
        if not np.isin(self.labels, (0.0, 1.0)).all():
            raise ModelError('labels must be 0 (hourly pool) or 1 (daily pool)')
        self.feature_means = self.features.mean(axis=0)
        sds = self.features.std(axis=0)
        flat = sds == 0.0
        if flat.any():
            LOGGER.warning('constant feature(s) %s: standard deviation set to 1',
                           ', '.join(name for name, is_flat in zip(self.feature_names, flat) if is_flat))
        self.feature_sds = np.where(flat, 1.0, sds)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        return HomogenizedSample(self.features[index], int(self.labels[index]))

    @property
    def standardized(self):
        return (self.features - self.feature_means) / self.feature_sds

    @property
    def n_hourly(self):
        return int((self.labels == 0).sum())

    @property
    def n_daily(self):
        return int((self.labels == 1).sum())


@dataclass(frozen=True)
class LogisticConfig:
    max_iter: int = 100
    tol: float = 1e-8
    ridge: float = DEFAULT_RIDGE


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """Fitted logistic model.

    ``alpha`` and ``beta`` act on raw (unstandardised) features, so ``beta * feature_sds`` are the
    standardised coefficients the ridge term penalises.
    """
    alpha: float
    beta: np.ndarray
    iterations: int
    converged: bool
    feature_means: np.ndarray
    feature_sds: np.ndarray
    feature_names: tuple = POLLUTANTS
    history: tuple = ()

    @property
    def standardized_beta(self):
        return np.asarray(self.beta) * np.asarray(self.feature_sds)

    @property
    def standardized_alpha(self):
        return float(self.alpha + np.dot(self.beta, self.feature_means))


@dataclass(frozen=True)
class FeatureSelection:
    """Pollutants ranked by descending standardised coefficient magnitude."""
    ranked: tuple
    selected: tuple
    scores: tuple

    def __post_init__(self):
        if self.selected != self.ranked[:len(self.selected)]:
            raise ValueError('selected features must be the head of the ranking')
        if any(score < 0 for score in self.scores):
            raise ValueError('selection scores are magnitudes')
        if any(nxt > prev for prev, nxt in zip(self.scores[:-1], self.scores[1:])):
            raise ValueError('selection scores must not increase along the ranking')

    @property
    def k(self):
        return len(self.selected)


def homogenize(hourly, daily, feature_names=POLLUTANTS):
    """Concatenate the hourly pool (label 0) and the daily pool (label 1)."""
    hourly = np.asarray(hourly, dtype=float)
    daily = np.asarray(daily, dtype=float)
    if hourly.size == 0 or daily.size == 0:
        raise ModelError('both the hourly and the daily pool must be non-empty')
    hourly = hourly.reshape(len(hourly), -1)
    daily = daily.reshape(len(daily), -1)
    features = np.vstack([hourly, daily])
    labels = np.concatenate([np.zeros(len(hourly)), np.ones(len(daily))])
    return HomogenizedSet(features, labels, feature_names)


def build_pools(hourly_series, daily_series=None):
    """Feature pools from denoised station series.

    The hourly pool holds every hourly row. The daily pool holds the rows of the native daily
    series when given, otherwise the daily means of the hourly series.
    """
    hourly = np.vstack([series.readings for series in hourly_series])
    if daily_series:
        daily = np.vstack([series.readings for series in daily_series])
    else:
        means = []
        for series in hourly_series:
            days = series.timestamps.normalize()
            for day in days.unique():
                means.append(series.readings[days == day].mean(axis=0))
        daily = np.array(means)
    return hourly, daily


def _linear_predictor(alpha, beta, features):
    return alpha + np.asarray(features, dtype=float) @ np.asarray(beta, dtype=float)


def log_likelihood(alpha, beta, features, labels, ridge=DEFAULT_RIDGE):
    """Ridge-penalised Bernoulli log-likelihood, evaluated with log(1 + exp(.)) in stable form."""
    beta = np.asarray(beta, dtype=float)
    eta = _linear_predictor(alpha, beta, features)
    labels = np.asarray(labels, dtype=float)
    return float(np.sum(labels * eta - np.logaddexp(0.0, eta)) - 0.5 * ridge * np.dot(beta, beta))


def score(alpha, beta, features, labels, ridge=DEFAULT_RIDGE):
    """Gradient of :func:`log_likelihood` as a ``(d/d alpha, d/d beta)`` pair."""
    beta = np.asarray(beta, dtype=float)
    residual = np.asarray(labels, dtype=float) - expit(_linear_predictor(alpha, beta, features))
    return float(np.sum(residual)), np.asarray(features, dtype=float).T @ residual - ridge * beta


def fit_logistic(samples, config=None):  # pylint: disable=too-many-locals
    """Newton iterations with step halving on the penalised log-likelihood, from (0, 0).

    :param samples: a :class:`HomogenizedSet`; the fit runs on its standardised features
    :param config: a :class:`LogisticConfig`
    :return: a :class:`LogisticModel`; ``converged`` is False when ``max_iter`` is reached
    """
    config = config or LogisticConfig()
    labels = samples.labels
    if len(samples) < 2 or len(np.unique(labels)) < 2:
        raise ModelError('the logistic fit needs samples from both the hourly and the daily pool')

    design = samples.standardized
    n_features = design.shape[1]
    alpha, beta = 0.0, np.zeros(n_features)
    current = log_likelihood(alpha, beta, design, labels, config.ridge)
    history = [current]
    converged = False
    iterations = 0

    while True:
        d_alpha, d_beta = score(alpha, beta, design, labels, config.ridge)
        gradient = np.concatenate([[d_alpha], d_beta])
        if np.max(np.abs(gradient)) < config.tol:
            converged = True
            break
        if iterations >= config.max_iter:
            break
        weights = expit(_linear_predictor(alpha, beta, design))
        weights = weights * (1.0 - weights)
        augmented = np.column_stack([np.ones(len(design)), design])
        hessian = (augmented.T * weights) @ augmented
        hessian[1:, 1:] += config.ridge * np.eye(n_features)
        try:
            step = linalg.solve(hessian, gradient, assume_a='pos')
        except linalg.LinAlgError:
            step = linalg.lstsq(hessian, gradient)[0]

        scale = 1.0
        for _ in range(MAX_HALVINGS):
            cand_alpha, cand_beta = alpha + scale * step[0], beta + scale * step[1:]
            candidate = log_likelihood(cand_alpha, cand_beta, design, labels, config.ridge)
            if candidate >= current:
                break
            scale *= 0.5
        else:
            LOGGER.debug('line search stalled after %d Newton iterations', iterations)
            break
        alpha, beta, current = cand_alpha, cand_beta, candidate
        history.append(current)
        iterations += 1

    if not converged:
        LOGGER.warning('logistic fit did not converge in %d iterations (max |score| %.3e)', iterations,
                       np.max(np.abs(gradient)))

    raw_beta = beta / samples.feature_sds
    raw_alpha = alpha - float(np.dot(raw_beta, samples.feature_means))
    return LogisticModel(alpha=raw_alpha,
                         beta=raw_beta,
                         iterations=iterations,
                         converged=converged,
                         feature_means=samples.feature_means,
                         feature_sds=samples.feature_sds,
                         feature_names=samples.feature_names,
                         history=tuple(history))


def select_features(model, k=DEFAULT_K):
    """Rank features by |beta_j * sd_j|, ties broken by canonical order, and keep the top ``k``."""
    if not model.converged:
        raise ModelError('feature selection needs a converged logistic model')
    names = tuple(model.feature_names)
    if not 1 <= k <= len(names):
        raise ModelError('k must lie in [1, {}], got {}'.format(len(names), k))
    magnitudes = np.abs(model.standardized_beta)
    order = sorted(range(len(names)), key=lambda j: (-magnitudes[j], j))
    ranked = tuple(names[j] for j in order)
    return FeatureSelection(ranked=ranked, selected=ranked[:k], scores=tuple(float(magnitudes[j]) for j in order))
