# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Least-squares support-vector regression, Kendall rank concordance and AQI banding.

Training solves the saddle system

    [ 0   1^T         ] [ B    ]   [ 0 ]
    [ 1   K + I/gamma ] [ dual ] = [ y ]

and the model predicts f(x) = sum_i dual_i K(x_i, x) + B.
"""

import logging
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist, pdist, squareform

from drlssv.common import ModelError, NumericalError
from drlssv.utils.ingestion import AQI_MAX, AqiBand

LOGGER = logging.getLogger(__name__)

DEFAULT_GAMMA = 10.0
DEFAULT_CAP_N = 5000
MEDIAN_HEURISTIC_ROWS = 1000
TAU_ZERO_TOL = 1e-12
TARGET_KIND = 'aqi'


class KernelKind(Enum):
    LINEAR = 'linear'
    RBF = 'rbf'


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind = KernelKind.RBF
    sigma: float = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', KernelKind(self.kind))
        if self.kind is KernelKind.RBF:
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise ModelError('an RBF kernel needs a positive bandwidth, got {}'.format(self.sigma))
            object.__setattr__(self, 'sigma', float(self.sigma))
        elif self.sigma is not None:
            object.__setattr__(self, 'sigma', None)


@dataclass(frozen=True, eq=False)
class LssvModel:
    """A trained least-squares SVM regressor of the AQI value.

    ``training_inputs`` are stored as given; ``offset`` and ``scale`` map them (and every query)
    to the space the kernel acts on.
    """
    training_inputs: np.ndarray
    dual: np.ndarray
    bias: float
    gamma: float
    kernel: KernelSpec
    offset: np.ndarray = None
    scale: np.ndarray = None
    feature_names: tuple = ()
    target_kind: str = TARGET_KIND

    def __post_init__(self):
        inputs = np.array(self.training_inputs, dtype=float)
        if inputs.ndim != 2 or inputs.shape[0] < 1:
            raise ModelError('training inputs must be a non-empty n x k matrix')
        n_rows, k = inputs.shape
        dual = np.array(self.dual, dtype=float)
        if dual.shape != (n_rows,):
            raise ModelError('one dual coefficient per training row expected')
        offset = np.zeros(k) if self.offset is None else np.array(self.offset, dtype=float)
        scale = np.ones(k) if self.scale is None else np.array(self.scale, dtype=float)
        if offset.shape != (k,) or scale.shape != (k,) or (scale <= 0).any():
            raise ModelError('offset and scale must be k-vectors with a positive scale')
        if self.feature_names and len(self.feature_names) != k:
            raise ModelError('one feature name per input column expected')
        for name, value in (('training_inputs', inputs), ('dual', dual), ('offset', offset), ('scale', scale)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, 'feature_names', tuple(self.feature_names))
        object.__setattr__(self, 'bias', float(self.bias))
        object.__setattr__(self, 'gamma', float(self.gamma))
        object.__setattr__(self, 'scaled_inputs', (inputs - offset) / scale)

    @property
    def n(self):
        return self.training_inputs.shape[0]

    @property
    def k(self):
        return self.training_inputs.shape[1]

    def transform(self, features):
        return (np.asarray(features, dtype=float) - self.offset) / self.scale


@dataclass(frozen=True)
class TauVerdict:
    tau: float
    band: AqiBand
    degenerate: bool = False
    n_pairs: int = 0

    def __post_init__(self):
        if not -1.0 <= self.tau <= 1.0:
            raise ValueError('tau must lie in [-1, 1], got {}'.format(self.tau))

    @property
    def diagnostic(self):
        return 'ties-degenerate' if self.degenerate else ''


def _as_matrix(features):
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, np.newaxis]
    if features.ndim != 2 or features.shape[0] < 1:
        raise ModelError('expected a non-empty n x k feature matrix')
    if not np.isfinite(features).all():
        raise ModelError('features must be finite')
    return features


def gram_matrix(features, kernel):
    """Symmetric n x n kernel matrix of the rows of ``features``."""
    features = _as_matrix(features)
    if kernel.kind is KernelKind.LINEAR:
        gram = features @ features.T
        return 0.5 * (gram + gram.T)
    return np.exp(-squareform(pdist(features, 'sqeuclidean')) / (2.0 * kernel.sigma**2))


def cross_kernel(queries, features, kernel):
    """m x n kernel matrix between query rows and training rows."""
    if kernel.kind is KernelKind.LINEAR:
        return queries @ features.T
    return np.exp(-cdist(queries, features, 'sqeuclidean') / (2.0 * kernel.sigma**2))


def median_heuristic(features, max_rows=MEDIAN_HEURISTIC_ROWS, seed=0):
    """Median pairwise Euclidean distance, on at most ``max_rows`` seeded rows; 1 when degenerate."""
    features = _as_matrix(features)
    if len(features) > max_rows:
        rows = np.random.default_rng(seed).choice(len(features), size=max_rows, replace=False)
        features = features[np.sort(rows)]
    distances = pdist(features)
    distances = distances[distances > 0]
    if distances.size == 0:
        return 1.0
    return float(np.median(distances))


def resolve_kernel(kind, sigma, features):
    """KernelSpec for a configured kind and a bandwidth that may be ``'median'``."""
    kind = KernelKind(kind)
    if kind is KernelKind.LINEAR:
        return KernelSpec(kind)
    if sigma is None or sigma == 'median':
        sigma = median_heuristic(features)
        LOGGER.info('RBF bandwidth from the median heuristic: %.6g', sigma)
    return KernelSpec(kind, float(sigma))


def saddle_matrix(gram, gamma):
    n_rows = len(gram)
    system = np.zeros((n_rows + 1, n_rows + 1))
    system[0, 1:] = 1.0
    system[1:, 0] = 1.0
    system[1:, 1:] = gram + np.eye(n_rows) / gamma
    return system


def train_lssv(features, targets, gamma=DEFAULT_GAMMA, kernel=None, standardize=False, feature_names=()):
    """Fit an LSSV regressor by an LU solve of the saddle system plus one refinement step.

    :param features: n x k training rows
    :param targets: n target values
    :param kernel: a :class:`KernelSpec`; RBF with the median-heuristic bandwidth when omitted
    :param standardize: learn a per-column offset/scale from the training rows
    :raises NumericalError: when the saddle system is singular
    """
    features = _as_matrix(features)
    targets = np.asarray(targets, dtype=float).reshape(-1)
    if len(targets) != len(features):
        raise ModelError('{} targets for {} training rows'.format(len(targets), len(features)))
    if not np.isfinite(targets).all():
        raise ModelError('targets must be finite')
    if not gamma > 0:
        raise ModelError('gamma must be positive, got {}'.format(gamma))

    offset = np.zeros(features.shape[1])
    scale = np.ones(features.shape[1])
    if standardize:
        offset = features.mean(axis=0)
        spread = features.std(axis=0)
        scale = np.where(spread > 0, spread, 1.0)
    scaled = (features - offset) / scale
    if kernel is None:
        kernel = resolve_kernel(KernelKind.RBF, 'median', scaled)

    system = saddle_matrix(gram_matrix(scaled, kernel), gamma)
    rhs = np.concatenate([[0.0], targets])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', linalg.LinAlgWarning)
            factors = linalg.lu_factor(system)
    except (linalg.LinAlgError, linalg.LinAlgWarning, ValueError):
        raise NumericalError('singular LSSV saddle system', np.linalg.cond(system))
    solution = linalg.lu_solve(factors, rhs)
    solution = solution + linalg.lu_solve(factors, rhs - system @ solution)
    if not np.isfinite(solution).all():
        raise NumericalError('LSSV saddle solve produced non-finite values', np.linalg.cond(system))

    residual = float(np.max(np.abs(system @ solution - rhs)))
    LOGGER.debug('LSSV trained on %d rows, KKT residual %.3e', len(features), residual)
    return LssvModel(training_inputs=features,
                     dual=solution[1:],
                     bias=solution[0],
                     gamma=gamma,
                     kernel=kernel,
                     offset=offset,
                     scale=scale,
                     feature_names=feature_names)


def kkt_residual(model, targets):
    """Max-norm residual of the saddle system at the stored solution."""
    system = saddle_matrix(gram_matrix(model.scaled_inputs, model.kernel), model.gamma)
    rhs = np.concatenate([[0.0], np.asarray(targets, dtype=float)])
    return float(np.max(np.abs(system @ np.concatenate([[model.bias], model.dual]) - rhs)))


def predict_batch(model, features):
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[1] != model.k:
        raise ModelError('expected rows of {} features'.format(model.k))
    if len(features) == 0:
        return np.zeros(0)
    if not np.isfinite(features).all():
        raise ModelError('features must be finite')
    kernel = cross_kernel(model.transform(features), model.scaled_inputs, model.kernel)
    return kernel @ model.dual + model.bias


def predict(model, features):
    """f(x) for a single k-vector."""
    features = np.asarray(features, dtype=float)
    if features.shape != (model.k,):
        raise ModelError('expected {} features, got shape {}'.format(model.k, features.shape))
    return float(predict_batch(model, features[np.newaxis, :])[0])


def classify_batch(model, features, breakpoints):
    """Clamped AQI predictions and their bands."""
    aqi = np.clip(predict_batch(model, features), 0.0, AQI_MAX)
    return aqi, breakpoints.bands_of(aqi)


def classify_aqi(model, features, breakpoints):
    aqi = min(max(predict(model, features), 0.0), AQI_MAX)
    return aqi, breakpoints.band_of(aqi)


def concordance_counts(first, second):
    """Concordant and discordant pair counts, sweeping one row of pairs at a time.

    Pairs tied in either sequence are counted in neither.
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    if first.shape != second.shape or first.ndim != 1:
        raise ValueError('Kendall tau needs two sequences of equal length')
    n_items = len(first)
    if n_items < 2:
        raise ValueError('Kendall tau needs at least two observations')
    concordant = discordant = 0
    for i in range(n_items - 1):
        signs = np.sign(first[i + 1:] - first[i]) * np.sign(second[i + 1:] - second[i])
        concordant += int(np.count_nonzero(signs > 0))
        discordant += int(np.count_nonzero(signs < 0))
    return concordant, discordant


def kendall_tau(first, second):
    """tau = (N_concordant - N_discordant) / (n (n - 1) / 2)."""
    concordant, discordant = concordance_counts(first, second)
    n_items = len(first)
    return (concordant - discordant) / (n_items * (n_items - 1) / 2.0)


def tau_band(tau):
    """Air-quality verdict of a concordance value."""
    if not np.isfinite(tau) or abs(tau) > 1.0 + TAU_ZERO_TOL:
        raise ValueError('tau must lie in [-1, 1], got {}'.format(tau))
    if abs(tau) <= TAU_ZERO_TOL:
        return AqiBand.GOOD
    if tau <= -0.5:
        return AqiBand.VERY_POOR
    if tau < 0:
        return AqiBand.POOR
    if tau <= 0.5:
        return AqiBand.SATISFACTORY
    if tau <= 1.0 + TAU_ZERO_TOL:
        return AqiBand.MODERATE
    return AqiBand.SEVERE


def tau_verdict(predicted, observed):
    """Kendall tau verdict between two sequences; all-tied input gives tau = 0, flagged degenerate."""
    concordant, discordant = concordance_counts(predicted, observed)
    n_items = len(predicted)
    n_pairs = n_items * (n_items - 1) // 2
    if concordant + discordant == 0:
        return TauVerdict(0.0, tau_band(0.0), degenerate=True, n_pairs=n_pairs)
    tau = float(np.clip((concordant - discordant) / float(n_pairs), -1.0, 1.0))
    return TauVerdict(tau, tau_band(tau), n_pairs=n_pairs)


def subsample_rows(n_rows, cap, seed):
    """Sorted indices of a uniform subsample of size ``cap`` (all rows when n_rows <= cap)."""
    if n_rows <= cap:
        return np.arange(n_rows)
    return np.sort(np.random.default_rng(seed).choice(n_rows, size=cap, replace=False))
