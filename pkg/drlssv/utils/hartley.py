# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Two-dimensional discrete Hartley transform and spectral denoising of station grids.

The forward transform of a P x Q grid x is

    H(a, b) = sum_d sum_h x[d, h] cas(2 pi (a d / P + b h / Q)),   cas(t) = cos(t) + sin(t)

with 0-based indices, and the inverse is the same sum over (a, b) scaled by 1 / (P Q).
Two implementations are provided: the direct O((PQ)^2) sum (``method='naive'``), which is the
reference, and the FFT route H = Re(F) - Im(F) (``method='fft'``, the default).
"""

import logging
from dataclasses import dataclass

import numpy as np

from drlssv.utils.ingestion import StationGrid

LOGGER = logging.getLogger(__name__)

DEFAULT_KEEP_FRACTION = 0.95
METHODS = ('fft', 'naive')


@dataclass(frozen=True, eq=False)
class HartleySpectrum:
    """Hartley coefficients H(a, b) of one station grid."""
    coefficients: np.ndarray
    station_id: str = None
    pollutant: str = None
    days: object = None

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float)
        if coefficients.ndim != 2 or 0 in coefficients.shape:
            raise ValueError('a Hartley spectrum is a non-empty P x Q matrix')
        if not np.isfinite(coefficients).all():
            raise ValueError('Hartley coefficients must be finite')
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)

    @property
    def shape(self):
        return self.coefficients.shape

    @property
    def energy(self):
        return float(np.sum(self.coefficients**2))


@dataclass(frozen=True)
class DenoiseConfig:
    """Fraction of the total spectral energy kept by :func:`denoise`."""
    keep_fraction: float = DEFAULT_KEEP_FRACTION

    def __post_init__(self):
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ValueError('keep_fraction must lie in (0, 1], got {}'.format(self.keep_fraction))


def cas_matrix(size):
    """cas(2 pi j k / size) for j, k in [0, size)."""
    theta = 2.0 * np.pi * np.outer(np.arange(size), np.arange(size)) / size
    return np.cos(theta) + np.sin(theta)


def _dht2_naive(values):
    """Direct double sum over every (a, b, d, h) quadruple."""
    n_days, n_hours = values.shape
    a_idx = np.arange(n_days)[:, None, None, None]
    b_idx = np.arange(n_hours)[None, :, None, None]
    d_idx = np.arange(n_days)[None, None, :, None]
    h_idx = np.arange(n_hours)[None, None, None, :]
    theta = 2.0 * np.pi * (a_idx * d_idx / n_days + b_idx * h_idx / n_hours)
    kernel = np.cos(theta) + np.sin(theta)
    return np.tensordot(kernel, values, axes=([2, 3], [0, 1]))


def _dht2_fft(values):
    spectrum = np.fft.fft2(values)
    return spectrum.real - spectrum.imag


def _dht2(values, method):
    if method == 'fft':
        return _dht2_fft(values)
    if method == 'naive':
        return _dht2_naive(values)
    raise ValueError("unknown Hartley method '{}', expected one of {}".format(method, METHODS))


def dht_forward(grid, method='fft'):
    """Hartley spectrum of a station grid (or of a bare 2-D array)."""
    if isinstance(grid, StationGrid):
        return HartleySpectrum(_dht2(grid.values, method), grid.station_id, grid.pollutant, grid.days)
    values = np.asarray(grid, dtype=float)
    if values.ndim != 2 or 0 in values.shape:
        raise ValueError('the Hartley transform needs a non-empty 2-D grid')
    return HartleySpectrum(_dht2(values, method))


def dht_inverse(spectrum, method='fft'):
    """Station grid whose forward transform is ``spectrum``."""
    n_days, n_hours = spectrum.shape
    values = _dht2(spectrum.coefficients, method) / (n_days * n_hours)
    return StationGrid(spectrum.station_id, spectrum.pollutant, values, spectrum.days)


def energy_mask(coefficients, keep_fraction):
    """Boolean mask of the smallest set of largest-energy coefficients reaching ``keep_fraction``.

    Ties in energy are broken by ascending (a, b) index.
    """
    energy = np.square(coefficients).reshape(-1)
    order = np.argsort(-energy, kind='stable')
    cumulative = np.cumsum(energy[order])
    total = cumulative[-1]
    mask = np.zeros(energy.size, dtype=bool)
    if total == 0.0:
        return mask.reshape(coefficients.shape)
    n_keep = min(int(np.searchsorted(cumulative, keep_fraction * total, side='left')) + 1, energy.size)
    mask[order[:n_keep]] = True
    return mask.reshape(coefficients.shape)


def denoise(grid, config=None, method='fft'):
    """Energy-fraction hard thresholding in the Hartley domain.

    :param grid: a :class:`StationGrid`
    :param config: a :class:`DenoiseConfig`, default keeps 95% of the energy
    :return: a StationGrid with the same dimensions
    """
    config = config or DenoiseConfig()
    spectrum = dht_forward(grid, method=method)
    mask = energy_mask(spectrum.coefficients, config.keep_fraction)
    LOGGER.debug('%s/%s: kept %d of %d Hartley coefficients', grid.station_id, grid.pollutant, int(mask.sum()),
                 mask.size)
    kept = HartleySpectrum(np.where(mask, spectrum.coefficients, 0.0), spectrum.station_id, spectrum.pollutant,
                           spectrum.days)
    return dht_inverse(kept, method=method)
