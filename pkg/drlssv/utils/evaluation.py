# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Forecast evaluation: band accuracy, false positive rates, timing, rank concordance and sweeps"""

import logging
import time
from dataclasses import dataclass

import numpy as np
import pandas as pd

from drlssv.common import ModelError
from drlssv.utils import lssv
from drlssv.utils.ingestion import AQI_MAX, AqiBand, POLLUTANTS

LOGGER = logging.getLogger(__name__)

N_BANDS = len(AqiBand)
DEFAULT_POSITIVE_SET = frozenset((AqiBand.POOR, AqiBand.VERY_POOR, AqiBand.SEVERE))
SPLITS = ('chronological', 'random')
TAU_WINDOWS = ('station', 'global')


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Rows of selected features with their observed AQI and band, in chronological order."""
    features: np.ndarray
    targets: np.ndarray
    bands: np.ndarray
    station_ids: np.ndarray
    timestamps: pd.DatetimeIndex
    feature_names: tuple = ()

    def __len__(self):
        return len(self.targets)

    def take(self, rows):
        rows = np.asarray(rows, dtype=int)
        return SampleSet(self.features[rows], self.targets[rows], self.bands[rows], self.station_ids[rows],
                         self.timestamps[rows], self.feature_names)

    def head(self, n_rows):
        return self.take(np.arange(min(n_rows, len(self))))


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Metrics of one forecaster on one test window."""
    method_name: str
    n_samples: int
    accuracy: float
    forecast_time_ms: float
    fpr: float
    confusion: np.ndarray
    per_band_fpr: np.ndarray
    tau_verdict: lssv.TauVerdict
    mae: float = 0.0
    n_misclassified: int = 0

    def __post_init__(self):
        if int(np.sum(self.confusion)) != self.n_samples:
            raise ValueError('confusion counts must sum to the number of samples')
        if abs(self.accuracy - np.trace(self.confusion) / self.n_samples) > 1e-12:
            raise ValueError('accuracy disagrees with the confusion matrix')

    @property
    def count_time_product(self):
        return self.n_samples * self.forecast_time_ms


def samples_from_series(series_list, feature_names):
    """Stack the rows of station series into a chronologically ordered :class:`SampleSet`.

    Rows are ordered by timestamp, then station id. Every row needs an AQI value and a band.
    """
    columns = [POLLUTANTS.index(name) for name in feature_names]
    features, targets, bands, stations, stamps = [], [], [], [], []
    for series in series_list:
        if series.aqi is None or series.band is None:
            raise ModelError('station {} has no AQI values attached'.format(series.station_id))
        features.append(series.readings[:, columns])
        targets.append(series.aqi)
        bands.append([-1 if band is None else int(band) for band in series.band])
        stations.append(np.full(len(series), series.station_id, dtype=object))
        stamps.append(series.timestamps.to_numpy())
    if not features:
        raise ModelError('no station rows to evaluate on')
    samples = SampleSet(np.vstack(features), np.concatenate(targets), np.concatenate(bands),
                        np.concatenate(stations), pd.DatetimeIndex(np.concatenate(stamps)), tuple(feature_names))
    known = np.isfinite(samples.targets) & (samples.bands >= 0)
    if not known.all():
        LOGGER.warning('%d row(s) without AQI or band left out of the sample set', int((~known).sum()))
        samples = samples.take(np.flatnonzero(known))
    order = np.lexsort((samples.station_ids.astype(str), samples.timestamps.to_numpy()))
    return samples.take(order)


def split_samples(samples, train_fraction=0.7, split='chronological', seed=0):
    """Disjoint train/test split; the test part stays in chronological order.

    ``chronological`` trains on the earliest ``train_fraction`` of the rows, ``random`` on a
    seeded uniform draw of the same size.
    """
    if split not in SPLITS:
        raise ModelError("unknown split '{}', expected one of {}".format(split, SPLITS))
    n_rows = len(samples)
    n_train = int(np.floor(train_fraction * n_rows))
    if n_train < 1 or n_train >= n_rows:
        raise ModelError('cannot split {} samples with train fraction {}'.format(n_rows, train_fraction))
    if split == 'chronological':
        train_rows = np.arange(n_train)
    else:
        train_rows = np.sort(np.random.default_rng(seed).permutation(n_rows)[:n_train])
    test_mask = np.ones(n_rows, dtype=bool)
    test_mask[train_rows] = False
    return samples.take(train_rows), samples.take(np.flatnonzero(test_mask))


def _check_labels(predicted, observed):
    predicted = np.asarray(predicted, dtype=int)
    observed = np.asarray(observed, dtype=int)
    if predicted.shape != observed.shape or predicted.ndim != 1:
        raise ValueError('predicted and observed bands must have the same length')
    if len(predicted) == 0:
        raise ValueError('at least one sample is needed')
    return predicted, observed


def accuracy(predicted, observed):
    """Fraction of samples whose predicted band equals the observed one."""
    predicted, observed = _check_labels(predicted, observed)
    return float(np.mean(predicted == observed))


def false_positive_rate(predicted, observed, positive_set=DEFAULT_POSITIVE_SET):
    """FP / (FP + TN) of the binary reduction 'band in positive_set'; 0 when FP + TN = 0."""
    predicted, observed = _check_labels(predicted, observed)
    positive = sorted(int(band) for band in positive_set)
    if not positive or len(positive) >= N_BANDS:
        raise ValueError('the positive set must be a non-empty proper subset of the bands')
    predicted_positive = np.isin(predicted, positive)
    observed_negative = ~np.isin(observed, positive)
    false_positives = int(np.sum(predicted_positive & observed_negative))
    true_negatives = int(np.sum(~predicted_positive & observed_negative))
    if false_positives + true_negatives == 0:
        return 0.0
    return false_positives / float(false_positives + true_negatives)


def per_band_fpr(predicted, observed):
    """One-vs-rest false positive rate of every band, Good to Severe."""
    return np.array([false_positive_rate(predicted, observed, {band}) for band in AqiBand])


def confusion_matrix(predicted, observed):
    """6 x 6 counts, rows indexed by the observed band and columns by the predicted one."""
    predicted, observed = _check_labels(predicted, observed)
    return np.bincount(observed * N_BANDS + predicted, minlength=N_BANDS * N_BANDS).reshape(N_BANDS, N_BANDS)


def measure_forecast_time(forecaster, features, breakpoints):
    """Wall-clock milliseconds of the predict-and-band loop, with its results.

    :return: (elapsed_ms, clamped AQI predictions, predicted bands)
    """
    features = np.asarray(features, dtype=float)
    if len(features) == 0:
        return 0.0, np.zeros(0), np.zeros(0, dtype=int)
    start = time.perf_counter()
    aqi = np.clip(forecaster.predict(features), 0.0, AQI_MAX)
    bands = breakpoints.bands_of(aqi)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return elapsed_ms, aqi, bands


def windowed_tau(predicted, observed, station_ids=None, window='station'):
    """Kendall tau verdict between predicted and observed AQI.

    ``global`` uses one window over the whole sequence. ``station`` computes tau per station
    (stations with fewer than two rows are skipped) and combines them weighted by pair count.
    """
    if window not in TAU_WINDOWS:
        raise ModelError("unknown tau window '{}', expected one of {}".format(window, TAU_WINDOWS))
    predicted = np.asarray(predicted, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if window == 'global' or station_ids is None:
        if len(predicted) < 2:
            return lssv.TauVerdict(0.0, lssv.tau_band(0.0), degenerate=True)
        return lssv.tau_verdict(predicted, observed)
    station_ids = np.asarray(station_ids)
    balance = ordered = n_pairs = 0
    for station in np.unique(station_ids):
        rows = station_ids == station
        if rows.sum() < 2:
            continue
        concordant, discordant = lssv.concordance_counts(predicted[rows], observed[rows])
        size = int(rows.sum())
        balance += concordant - discordant
        ordered += concordant + discordant
        n_pairs += size * (size - 1) // 2
    if ordered == 0:
        return lssv.TauVerdict(0.0, lssv.tau_band(0.0), degenerate=True, n_pairs=n_pairs)
    tau = float(np.clip(balance / float(n_pairs), -1.0, 1.0))
    return lssv.TauVerdict(tau, lssv.tau_band(tau), n_pairs=n_pairs)


def evaluate(forecaster, test, breakpoints, positive_set=DEFAULT_POSITIVE_SET, tau_window='station', method_name=None):
    """Evaluate a fitted forecaster on a test :class:`SampleSet`."""
    if len(test) == 0:
        raise ModelError('the test split is empty')
    method_name = method_name or forecaster.name
    elapsed_ms, aqi, predicted = measure_forecast_time(forecaster, test.features, breakpoints)
    observed = test.bands
    confusion = confusion_matrix(predicted, observed)
    verdict = windowed_tau(aqi, test.targets, test.station_ids, tau_window)
    if verdict.degenerate:
        LOGGER.warning('%s: every prediction/observation pair is tied, tau reported as 0', method_name)
    report = EvalReport(method_name=method_name,
                        n_samples=len(test),
                        accuracy=float(np.trace(confusion)) / len(test),
                        forecast_time_ms=elapsed_ms,
                        fpr=false_positive_rate(predicted, observed, positive_set),
                        confusion=confusion,
                        per_band_fpr=per_band_fpr(predicted, observed),
                        tau_verdict=verdict,
                        mae=float(np.mean(np.abs(aqi - test.targets))),
                        n_misclassified=int(np.sum(predicted != observed)))
    LOGGER.info('%s on %d samples: accuracy %.4f, FPR %.4f, %.1f ms', method_name, report.n_samples, report.accuracy,
                report.fpr, report.forecast_time_ms)
    return report


def sweep_report(forecasters, test, sizes, breakpoints, positive_set=DEFAULT_POSITIVE_SET, tau_window='station'):
    """Evaluate every fitted forecaster on the first ``n`` test samples for each ``n`` in ``sizes``.

    :param forecasters: mapping of method name to fitted forecaster, in report order
    :return: list of :class:`EvalReport`, grouped by size then method
    """
    sizes = [int(size) for size in sizes]
    if not sizes:
        raise ModelError('the sweep needs at least one size')
    if any(nxt <= prev for prev, nxt in zip(sizes[:-1], sizes[1:])) or sizes[0] < 1:
        raise ModelError('sweep sizes must be positive and strictly ascending: {}'.format(sizes))
    for size in sizes:
        if size > len(test):
            raise ModelError('sweep size {} exceeds the {} available test samples'.format(size, len(test)))
    reports = []
    for size in sizes:
        window = test.head(size)
        for name, forecaster in forecasters.items():
            reports.append(evaluate(forecaster, window, breakpoints, positive_set, tau_window, method_name=name))
    return reports


def relative_improvement(reports, reference='drlssv'):
    """Mean accuracy gain, FPR reduction and time ratio of ``reference`` over every other method.

    Sizes where a method is missing are ignored; a zero baseline time gives a NaN ratio.
    """
    by_size = {}
    for report in reports:
        by_size.setdefault(report.n_samples, {})[report.method_name] = report
    gains = {}
    for methods in by_size.values():
        if reference not in methods:
            continue
        ours = methods[reference]
        for name, other in methods.items():
            if name == reference:
                continue
            ratio = ours.forecast_time_ms / other.forecast_time_ms if other.forecast_time_ms > 0 else np.nan
            gains.setdefault(name, []).append((ours.accuracy - other.accuracy, other.fpr - ours.fpr, ratio))
    return {
        name: dict(zip(('accuracy_gain', 'fpr_reduction', 'time_ratio'), np.mean(np.array(values), axis=0).tolist()))
        for name, values in gains.items()
    }
