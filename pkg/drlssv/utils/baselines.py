# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""AQI forecasters compared in evaluation reports.

Every forecaster exposes ``fit(features, targets)`` returning itself and ``predict(features)``
returning AQI values. ``ridge``, ``knn`` and ``majority`` are reference baselines that stand in
for the deep-learning comparators.
"""

import logging

import numpy as np
from scipy import linalg
from scipy.spatial import cKDTree

from drlssv.common import ModelError
from drlssv.utils import lssv

LOGGER = logging.getLogger(__name__)

METHODS = ('drlssv', 'ridge', 'knn', 'majority')


class Forecaster(object):
    """Base class; subclasses fill in ``_fit`` and ``_predict``."""

    name = None

    def fit(self, features, targets):
        features = np.asarray(features, dtype=float)
        targets = np.asarray(targets, dtype=float).reshape(-1)
        if features.ndim != 2 or len(features) == 0 or len(features) != len(targets):
            raise ModelError('{}: expected a non-empty n x k matrix and n targets'.format(self.name))
        self.n_features_ = features.shape[1]  # pylint: disable=attribute-defined-outside-init
        self._fit(features, targets)
        return self

    def predict(self, features):
        if not hasattr(self, 'n_features_'):
            raise ModelError('{} forecaster used before fit'.format(self.name))
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != self.n_features_:
            raise ModelError('{}: expected rows of {} features'.format(self.name, self.n_features_))
        if len(features) == 0:
            return np.zeros(0)
        return self._predict(features)

    def _fit(self, features, targets):
        raise NotImplementedError

    def _predict(self, features):
        raise NotImplementedError


class LssvForecaster(Forecaster):
    """The LSSV regressor, trained on at most ``cap_n`` uniformly subsampled rows."""

    name = 'drlssv'

    def __init__(self, gamma=lssv.DEFAULT_GAMMA, kernel='rbf', sigma='median', cap_n=lssv.DEFAULT_CAP_N, seed=0,
                 standardize=True, feature_names=()):
        self.gamma = gamma
        self.kernel = kernel
        self.sigma = sigma
        self.cap_n = cap_n
        self.seed = seed
        self.standardize = standardize
        self.feature_names = tuple(feature_names)
        self.model_ = None
        self.n_dropped_ = 0

    def _fit(self, features, targets):
        rows = lssv.subsample_rows(len(features), self.cap_n, self.seed)
        self.n_dropped_ = len(features) - len(rows)
        if self.n_dropped_:
            LOGGER.warning('LSSV training capped at %d rows (%d subsampled away)', self.cap_n, self.n_dropped_)
        features, targets = features[rows], targets[rows]
        scaled = features
        if self.standardize:
            spread = features.std(axis=0)
            scaled = (features - features.mean(axis=0)) / np.where(spread > 0, spread, 1.0)
        kernel = lssv.resolve_kernel(self.kernel, self.sigma, scaled)
        self.model_ = lssv.train_lssv(features, targets, self.gamma, kernel, standardize=self.standardize,
                                      feature_names=self.feature_names)

    def _predict(self, features):
        return lssv.predict_batch(self.model_, features)

    @classmethod
    def from_model(cls, model):
        """Wrap an already trained :class:`~drlssv.utils.lssv.LssvModel`."""
        forecaster = cls(gamma=model.gamma, kernel=model.kernel.kind.value, sigma=model.kernel.sigma,
                         feature_names=model.feature_names)
        forecaster.model_ = model
        forecaster.n_features_ = model.k
        return forecaster


class RidgeForecaster(Forecaster):
    """Linear ridge regression with an unpenalised intercept, solved in closed form."""

    name = 'ridge'

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def _fit(self, features, targets):
        self.mean_ = features.mean(axis=0)  # pylint: disable=attribute-defined-outside-init
        centred = features - self.mean_
        normal = centred.T @ centred + self.alpha * np.eye(features.shape[1])
        self.coef_ = linalg.solve(normal, centred.T @ (targets - targets.mean()), assume_a='pos')  # pylint: disable=attribute-defined-outside-init
        self.intercept_ = float(targets.mean())  # pylint: disable=attribute-defined-outside-init

    def _predict(self, features):
        return (features - self.mean_) @ self.coef_ + self.intercept_


class KnnForecaster(Forecaster):
    """Mean target of the ``k`` nearest training rows (Euclidean, on standardised columns)."""

    name = 'knn'

    def __init__(self, k=5):
        if k < 1:
            raise ModelError('k-NN needs k >= 1')
        self.k = k

    def _fit(self, features, targets):
        spread = features.std(axis=0)
        self.offset_ = features.mean(axis=0)  # pylint: disable=attribute-defined-outside-init
        self.scale_ = np.where(spread > 0, spread, 1.0)  # pylint: disable=attribute-defined-outside-init
        self.tree_ = cKDTree((features - self.offset_) / self.scale_)  # pylint: disable=attribute-defined-outside-init
        self.targets_ = targets  # pylint: disable=attribute-defined-outside-init

    def _predict(self, features):
        k = min(self.k, len(self.targets_))
        _, neighbours = self.tree_.query((features - self.offset_) / self.scale_, k=k)
        neighbours = np.asarray(neighbours).reshape(len(features), k)
        return self.targets_[neighbours].mean(axis=1)


class MajorityForecaster(Forecaster):
    """Constant prediction: the midpoint AQI of the most frequent training band."""

    name = 'majority'

    def __init__(self, breakpoints):
        self.breakpoints = breakpoints

    def _fit(self, features, targets):
        bands = self.breakpoints.bands_of(targets)
        self.band_ = int(np.bincount(bands).argmax())  # pylint: disable=attribute-defined-outside-init
        self.value_ = self.breakpoints.band_midpoint(self.band_)  # pylint: disable=attribute-defined-outside-init

    def _predict(self, features):
        return np.full(len(features), self.value_)


def make_forecaster(method, config, breakpoints, feature_names=()):
    """Forecaster for a method name, parameterised from a :class:`~drlssv.utils.config.PipelineConfig`."""
    if method == 'drlssv':
        return LssvForecaster(gamma=config.lssv.gamma,
                              kernel=config.lssv.kernel,
                              sigma=config.lssv.sigma,
                              cap_n=config.lssv.cap_n,
                              seed=config.eval.seed,
                              feature_names=feature_names)
    if method == 'ridge':
        return RidgeForecaster(alpha=config.eval.ridge_alpha)
    if method == 'knn':
        return KnnForecaster(k=config.eval.knn_k)
    if method == 'majority':
        return MajorityForecaster(breakpoints)
    raise ModelError("unknown method '{}', expected one of {}".format(method, METHODS))
