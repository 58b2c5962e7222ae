# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Planted synthetic station data.

Every random draw comes from one ``numpy.random.default_rng(seed)`` (PCG64) generator, consumed
station by station in a fixed order, so an identical :class:`SynthSpec` gives identical bytes.

For station ``s`` and hour of day ``h`` the clean value of a *planted* pollutant ``p`` is

    clean = BASE[p] * (1 + A * cos(2 pi (h - phi_s) / 24))

where ``A`` is ``diurnal_amplitude`` and the phase ``phi_s`` is drawn from {0, 6, 12, 18} h. The
clean Day x Hour grid therefore has three non-zero Hartley coefficients: the mean and two
diurnal ones, each carrying ``A^2 / 4`` of the energy of the mean; for A = 0.6 the mean alone
holds 85 % of the energy and the mean plus one diurnal coefficient 92 %, so a 0.95 energy cut
keeps all three. Unplanted pollutants are flat at a station level drawn uniformly in
[0.5, 1.5] * FLAT[p]; at 1.5 * FLAT[p] every sub-index stays at or below 75, under the lowest
PM10 sub-index (80) of the default planted set, so the AQI of all seven clean pollutants is the
AQI of the planted ones.

Observed values add ``noise_sd * base * N(0, 1)`` and, with probability ``spike_rate`` per cell,
a positive spike of ``1.5 * base``; they are clamped at zero. With the default noise (0.05) and
spike rate (0.01) the noise holds about 2 % of a planted grid's energy, so a 0.95 cut keeps the
three clean coefficients and nothing else. The true AQI (and band) of each hour is the AQI of
the clean planted pollutants.

The daily file reports, per day, the peak 8-hour mean of the observed planted pollutants and the
24-hour mean of the others; its AQI is computed from the same aggregates of the clean values.
"""

import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
import pandas as pd

from drlssv.common import InputValidationError
from drlssv.utils.ingestion import AqiBand, Cadence, POLLUTANTS, StationSeries, compute_aqi_batch

LOGGER = logging.getLogger(__name__)

BASE_LEVELS = {
    'PM2.5': 90.0,
    'PM10': 200.0,
    'SO2': 60.0,
    'NOx': 120.0,
    'NH3': 300.0,
    'CO': 1.2,
    'O3': 60.0,
}
FLAT_LEVELS = {
    'PM2.5': 30.0,
    'PM10': 40.0,
    'SO2': 40.0,
    'NOx': 40.0,
    'NH3': 200.0,
    'CO': 0.8,
    'O3': 40.0,
}
PHASES = (0, 6, 12, 18)
PEAK_WINDOW_HOURS = 8
SPIKE_AMPLITUDE = 1.5
START = '2019-01-01'

SynthDataset = namedtuple('SynthDataset', 'hourly daily clean')


@dataclass(frozen=True)
class SynthSpec:
    n_stations: int = 5
    days: int = 120
    seed: int = 42
    planted: tuple = ('PM10', 'CO', 'O3')
    noise_sd: float = 0.05
    spike_rate: float = 0.01
    diurnal_amplitude: float = 0.6

    def __post_init__(self):
        object.__setattr__(self, 'planted', tuple(self.planted))
        if self.n_stations < 1 or self.days < 1:
            raise InputValidationError('synth needs at least one station and one day')
        if not self.planted or len(set(self.planted)) != len(self.planted):
            raise InputValidationError('synth.planted must list distinct pollutants')
        unknown = [name for name in self.planted if name not in POLLUTANTS]
        if unknown:
            raise InputValidationError('synth.planted names unknown pollutants: {}'.format(', '.join(unknown)))
        if self.noise_sd < 0:
            raise InputValidationError('synth.noise_sd must be non-negative')
        if not 0 <= self.spike_rate <= 1:
            raise InputValidationError('synth.spike_rate must lie in [0, 1]')
        if not 0 <= self.diurnal_amplitude < 1:
            raise InputValidationError('synth.diurnal_amplitude must lie in [0, 1)')
        if not 0 <= self.seed < 2**64:
            raise InputValidationError('synth.seed must be an unsigned 64-bit integer')


def _peak_window_mean(values):
    """Largest mean over contiguous 8-hour windows inside each day, for a (days, 24) array."""
    windows = np.lib.stride_tricks.sliding_window_view(values, PEAK_WINDOW_HOURS, axis=1)
    return windows.mean(axis=2).max(axis=1)


def _station(spec, rng, breakpoints, station_id, hourly_stamps, day_stamps):  # pylint: disable=too-many-locals
    n_hours = spec.days * 24
    phase = PHASES[int(rng.integers(len(PHASES)))]
    levels = np.array([BASE_LEVELS[name] for name in POLLUTANTS])
    flat_levels = np.array([FLAT_LEVELS[name] for name in POLLUTANTS]) * rng.uniform(0.5, 1.5, size=len(POLLUTANTS))
    noise = rng.standard_normal((n_hours, len(POLLUTANTS)))
    spikes = rng.random((n_hours, len(POLLUTANTS))) < spec.spike_rate

    hours = np.tile(np.arange(24), spec.days)
    diurnal = 1.0 + spec.diurnal_amplitude * np.cos(2.0 * np.pi * (hours - phase) / 24.0)
    planted = np.isin(POLLUTANTS, spec.planted)
    clean = np.where(planted, levels * diurnal[:, np.newaxis], flat_levels)
    scale = np.where(planted, levels, flat_levels)
    observed = np.maximum(clean + spec.noise_sd * scale * noise + SPIKE_AMPLITUDE * scale * spikes, 0.0)

    aqi, bands = compute_aqi_batch(clean, breakpoints, spec.planted)
    hourly = StationSeries(station_id, Cadence.HOURLY, hourly_stamps, observed, aqi,
                           tuple(AqiBand(int(b)) for b in bands))
    clean_series = StationSeries(station_id, Cadence.HOURLY, hourly_stamps, clean, aqi,
                                 tuple(AqiBand(int(b)) for b in bands))

    def aggregate(values):
        by_day = values.reshape(spec.days, 24, len(POLLUTANTS))
        out = by_day.mean(axis=1)
        for col in np.flatnonzero(planted):
            out[:, col] = _peak_window_mean(by_day[:, :, col])
        return out

    daily_clean = aggregate(clean)
    daily_aqi, daily_bands = compute_aqi_batch(daily_clean, breakpoints, spec.planted)
    daily = StationSeries(station_id, Cadence.DAILY, day_stamps, aggregate(observed), daily_aqi,
                          tuple(AqiBand(int(b)) for b in daily_bands))
    return hourly, daily, clean_series


def generate(spec, breakpoints):
    """Hourly series, native daily series and clean hourly series of every synthetic station."""
    rng = np.random.default_rng(spec.seed)
    hourly_stamps = pd.date_range(START, periods=spec.days * 24, freq='h')
    day_stamps = pd.date_range(START, periods=spec.days, freq='D')
    hourly, daily, clean = [], [], []
    for index in range(spec.n_stations):
        station_id = 'SYN{:03d}'.format(index + 1)
        station = _station(spec, rng, breakpoints, station_id, hourly_stamps, day_stamps)
        hourly.append(station[0])
        daily.append(station[1])
        clean.append(station[2])
    LOGGER.info('generated %d synthetic station(s) over %d day(s), planted %s', spec.n_stations, spec.days,
                ', '.join(spec.planted))
    return SynthDataset(hourly, daily, clean)
