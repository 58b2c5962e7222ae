# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Station CSV ingestion, imputation, Day x Hour grids and AQI computation"""

import io
import os
import logging
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum

import numpy as np
import pandas as pd

from drlssv.common import AqiError, Diagnostics, GridError, ImputationError, RowError, SchemaError

LOGGER = logging.getLogger(__name__)

POLLUTANTS = ('PM2.5', 'PM10', 'SO2', 'NOx', 'NH3', 'CO', 'O3')
AQI_MAX = 500.0

PROTOCOLS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'protocols')
BUNDLED_BREAKPOINTS = os.path.join(PROTOCOLS_DIR, 'breakpoints_cpcb.csv')
BUNDLED_BANDS = os.path.join(PROTOCOLS_DIR, 'bands_cpcb.csv')


class Cadence(Enum):
    """Sampling cadence of a station series."""
    HOURLY = 'hourly'
    DAILY = 'daily'

    @property
    def hours_per_day(self):
        return 24 if self is Cadence.HOURLY else 1

    @property
    def freq(self):
        return 'h' if self is Cadence.HOURLY else 'D'

    @property
    def timestamp_format(self):
        return '%Y-%m-%d %H:%M' if self is Cadence.HOURLY else '%Y-%m-%d'

    @property
    def accepted_formats(self):
        if self is Cadence.HOURLY:
            return ('%Y-%m-%d %H:%M', '%Y-%m-%d %H:%M:%S')
        return ('%Y-%m-%d', '%Y-%m-%d %H:%M:%S')


class AqiBand(IntEnum):
    """The six AQI bands, ordered by severity."""
    GOOD = 0
    SATISFACTORY = 1
    MODERATE = 2
    POOR = 3
    VERY_POOR = 4
    SEVERE = 5

    @property
    def label(self):
        return _BAND_LABELS[self]

    @property
    def key(self):
        """Configuration spelling, e.g. ``VeryPoor``."""
        return self.label.replace(' ', '')

    @classmethod
    def from_label(cls, text):
        try:
            return _BANDS_BY_NAME[text.strip().replace(' ', '').replace('_', '').lower()]
        except KeyError:
            raise ValueError("unknown AQI band '{}'".format(text))


_BAND_LABELS = {
    AqiBand.GOOD: 'Good',
    AqiBand.SATISFACTORY: 'Satisfactory',
    AqiBand.MODERATE: 'Moderate',
    AqiBand.POOR: 'Poor',
    AqiBand.VERY_POOR: 'Very Poor',
    AqiBand.SEVERE: 'Severe',
}
_BANDS_BY_NAME = {label.replace(' ', '').lower(): band for band, label in _BAND_LABELS.items()}


class ImputationPolicy(Enum):
    LINEAR = 'linear'
    MEDIAN = 'median'
    FFILL = 'ffill'


def _frozen(array, dtype=float):
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StationSeries:
    """One station's timestamped pollutant readings.

    ``readings`` has one row per timestamp and one column per entry of :data:`POLLUTANTS`;
    missing cells are NaN. ``aqi`` (NaN where unknown) and ``band`` (None where unknown) are
    optional.
    """
    station_id: str
    cadence: Cadence
    timestamps: pd.DatetimeIndex
    readings: np.ndarray
    aqi: np.ndarray = None
    band: tuple = None

    def __post_init__(self):
        timestamps = pd.DatetimeIndex(self.timestamps)
        readings = _frozen(self.readings)
        if readings.ndim != 2 or readings.shape[1] != len(POLLUTANTS):
            raise ValueError('readings must have one column per pollutant')
        if readings.shape[0] != len(timestamps):
            raise ValueError('readings row count differs from the number of timestamps')
        if len(timestamps) > 1:
            steps = np.diff(timestamps.to_numpy().astype('datetime64[ns]').astype(np.int64))
            unit = pd.Timedelta(1, unit=self.cadence.freq).value
            if (steps <= 0).any():
                raise ValueError('timestamps of station {} are not strictly increasing'.format(self.station_id))
            if (steps % unit).any():
                raise ValueError('timestamps of station {} are not spaced by the {} cadence'.format(
                    self.station_id, self.cadence.value))
        if (readings[~np.isnan(readings)] < 0).any():
            raise ValueError('negative concentration in station {}'.format(self.station_id))
        object.__setattr__(self, 'timestamps', timestamps)
        object.__setattr__(self, 'readings', readings)
        if self.aqi is not None:
            aqi = _frozen(self.aqi)
            known = aqi[~np.isnan(aqi)]
            if aqi.shape != (len(timestamps),) or (known < 0).any() or (known > AQI_MAX).any():
                raise ValueError('AQI values must lie in [0, 500], one per timestamp')
            object.__setattr__(self, 'aqi', aqi)
        if self.band is not None:
            band = tuple(None if b is None else AqiBand(b) for b in self.band)
            if len(band) != len(timestamps):
                raise ValueError('one band per timestamp expected')
            object.__setattr__(self, 'band', band)

    def __len__(self):
        return len(self.timestamps)

    def __eq__(self, other):
        if not isinstance(other, StationSeries):
            return NotImplemented
        return (self.station_id == other.station_id and self.cadence is other.cadence and
                self.timestamps.equals(other.timestamps) and
                np.array_equal(self.readings, other.readings, equal_nan=True) and
                _optional_equal(self.aqi, other.aqi) and self.band == other.band)

    def __hash__(self):
        return hash((self.station_id, self.cadence, len(self)))

    def column(self, pollutant):
        return self.readings[:, POLLUTANTS.index(pollutant)]

    @property
    def n_missing(self):
        return int(np.isnan(self.readings).sum())


def _optional_equal(first, second):
    if first is None or second is None:
        return first is None and second is None
    return np.array_equal(first, second, equal_nan=True)


@dataclass(frozen=True, eq=False)
class StationGrid:
    """Day x Hour matrix of one pollutant at one station (Q = 24 hourly, Q = 1 daily)."""
    station_id: str
    pollutant: str
    values: np.ndarray
    days: pd.DatetimeIndex = field(default=None)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise GridError('a station grid needs at least one day and one hour')
        if not np.isfinite(values).all():
            raise GridError('grid of {}/{} has missing cells'.format(self.station_id, self.pollutant))
        object.__setattr__(self, 'values', values)
        if self.days is not None:
            object.__setattr__(self, 'days', pd.DatetimeIndex(self.days))

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class Segment:
    conc_low: float
    conc_high: float
    index_low: float
    index_high: float


@dataclass(frozen=True, eq=False)
class AqiBreakpoints:
    """Per-pollutant sub-index segments and the band table."""
    segments: dict
    bands: tuple

    def __post_init__(self):
        for pollutant in POLLUTANTS:
            if pollutant not in self.segments:
                raise AqiError("breakpoint table has no segments for '{}'".format(pollutant))
            _check_segments(pollutant, self.segments[pollutant])
        unknown = set(self.segments) - set(POLLUTANTS)
        if unknown:
            raise AqiError('breakpoint table names unknown pollutants: {}'.format(', '.join(sorted(unknown))))
        _check_bands(self.bands)
        knots = {}
        for pollutant, segs in self.segments.items():
            knots[pollutant] = (np.array([segs[0].conc_low] + [s.conc_high for s in segs]),
                                np.array([segs[0].index_low] + [s.index_high for s in segs]))
        object.__setattr__(self, '_knots', knots)
        object.__setattr__(self, '_band_highs', np.array([high for _, high, _ in self.bands]))

    @classmethod
    def from_csv(cls, breakpoints_csv, bands_csv):
        """Build the tables from the two fixture CSV documents (bytes or str)."""
        seg_frame = _read_fixture(breakpoints_csv, ('pollutant', 'conc_low', 'conc_high', 'index_low', 'index_high'))
        band_frame = _read_fixture(bands_csv, ('aqi_low', 'aqi_high', 'band'))
        segments = {}
        for row in seg_frame.itertuples(index=False):
            segments.setdefault(row.pollutant.strip(), []).append(
                Segment(float(row.conc_low), float(row.conc_high), float(row.index_low), float(row.index_high)))
        bands = tuple((float(row.aqi_low), float(row.aqi_high), AqiBand.from_label(row.band))
                      for row in band_frame.itertuples(index=False))
        return cls({key: tuple(value) for key, value in segments.items()}, bands)

    @classmethod
    def from_files(cls, breakpoints_path=None, bands_path=None):
        with open(breakpoints_path or BUNDLED_BREAKPOINTS, 'rb') as fobj:
            breakpoints_csv = fobj.read()
        with open(bands_path or BUNDLED_BANDS, 'rb') as fobj:
            bands_csv = fobj.read()
        return cls.from_csv(breakpoints_csv, bands_csv)

    @classmethod
    def bundled(cls):
        """The CPCB tables shipped with the package."""
        return cls.from_files()

    def sub_index(self, pollutant, concentration):
        """Piecewise-linear sub-index, saturating at 500 above the last segment."""
        conc, index = self._knots[pollutant]
        return np.interp(concentration, conc, index)

    def band_of(self, aqi):
        return AqiBand(int(self.bands_of(np.array([aqi]))[0]))

    def bands_of(self, aqi):
        """Vectorised band lookup; band upper edges are inclusive."""
        aqi = np.clip(np.asarray(aqi, dtype=float), 0.0, AQI_MAX)
        positions = np.searchsorted(self._band_highs, aqi, side='left')
        return np.array([self.bands[pos][2] for pos in np.minimum(positions, len(self.bands) - 1)], dtype=int)

    def band_midpoint(self, band):
        for low, high, name in self.bands:
            if name == band:
                return 0.5 * (low + high)
        raise AqiError('band {} is not in the band table'.format(band))


def _read_fixture(document, columns):
    if isinstance(document, str):
        document = document.encode('utf-8')
    frame = pd.read_csv(io.BytesIO(document), dtype=str, keep_default_na=False)
    frame.columns = [name.strip() for name in frame.columns]
    for column in columns:
        if column not in frame.columns:
            raise SchemaError(column, 'AQI fixture')
    return frame


def _check_segments(pollutant, segments):
    if not segments:
        raise AqiError("no segments for '{}'".format(pollutant))
    if segments[0].conc_low != 0 or segments[0].index_low != 0:
        raise AqiError("segments of '{}' must start at concentration 0 and index 0".format(pollutant))
    if segments[-1].index_high != AQI_MAX:
        raise AqiError("segments of '{}' must end at index 500".format(pollutant))
    for seg in segments:
        if not (seg.conc_low < seg.conc_high and seg.index_low < seg.index_high):
            raise AqiError("empty or reversed segment for '{}'".format(pollutant))
    for prev, nxt in zip(segments[:-1], segments[1:]):
        if prev.conc_high != nxt.conc_low or prev.index_high != nxt.index_low:
            raise AqiError("segments of '{}' are not contiguous".format(pollutant))


def _check_bands(bands):
    if len(bands) != len(AqiBand):
        raise AqiError('the band table must have exactly six rows')
    if [name for _, _, name in bands] != list(AqiBand):
        raise AqiError('the band table must list the bands from Good to Severe')
    if bands[0][0] != 0 or bands[-1][1] != AQI_MAX:
        raise AqiError('the band table must cover [0, 500]')
    for (_, prev_high, _), (next_low, _, _) in zip(bands[:-1], bands[1:]):
        if prev_high != next_low:
            raise AqiError('the band table is not contiguous')


def compute_aqi(concentrations, breakpoints):
    """AQI and band of one 7-vector of concentrations (max of the sub-indices)."""
    concentrations = np.asarray(concentrations, dtype=float)
    if concentrations.shape != (len(POLLUTANTS),):
        raise AqiError('expected {} concentrations'.format(len(POLLUTANTS)))
    if np.isnan(concentrations).any():
        raise AqiError('all seven concentrations are required')
    if (concentrations < 0).any():
        raise AqiError('negative concentration')
    aqi, bands = compute_aqi_batch(concentrations[np.newaxis, :], breakpoints)
    return float(aqi[0]), AqiBand(int(bands[0]))


def compute_aqi_batch(readings, breakpoints, pollutants=POLLUTANTS):
    """Row-wise AQI of an (n, 7) reading matrix, restricted to ``pollutants``.

    Rows with a missing value among ``pollutants`` get NaN and band -1.
    """
    readings = np.asarray(readings, dtype=float)
    sub = np.column_stack(
        [breakpoints.sub_index(name, readings[:, POLLUTANTS.index(name)]) for name in pollutants])
    aqi = np.clip(sub.max(axis=1), 0.0, AQI_MAX)
    missing = np.isnan(readings[:, [POLLUTANTS.index(name) for name in pollutants]]).any(axis=1)
    aqi[missing] = np.nan
    bands = np.full(len(aqi), -1, dtype=int)
    if (~missing).any():
        bands[~missing] = breakpoints.bands_of(aqi[~missing])
    return aqi, bands


def read_station_csv(path, cadence, diagnostics=None):
    with open(path, 'rb') as fobj:
        return parse_station_csv(fobj.read(), cadence, diagnostics=diagnostics, source=path)


def parse_station_csv(data, cadence, diagnostics=None, source=None):  # pylint: disable=too-many-locals
    """Parse a station CSV document into one :class:`StationSeries` per station.

    Rejected rows are recorded in ``diagnostics`` with their line number and skipped.
    Gaps inside a station's time range are filled with all-missing rows.

    :param data: UTF-8 CSV document (bytes or str)
    :param cadence: a :class:`Cadence`
    :return: list of StationSeries sorted by station id
    """
    cadence = Cadence(cadence)
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    if isinstance(data, str):
        data = data.encode('utf-8')
    frame = pd.read_csv(io.BytesIO(data), dtype=str, keep_default_na=False, encoding='utf-8')
    frame.columns = [name.strip() for name in frame.columns]

    station_col = _first_present(frame, ('StationId', 'City'), source)
    time_col = _first_present(frame, ('Datetime', 'Date'), source)
    for pollutant in POLLUTANTS:
        if pollutant not in frame.columns:
            raise SchemaError(pollutant, source)
    if frame.empty:
        return []

    lines = np.arange(len(frame)) + 2
    reasons = pd.Series('', index=frame.index)

    stations = frame[station_col].str.strip()
    reasons[stations == ''] = 'empty station identifier'

    timestamps, bad_time = _parse_timestamps(frame[time_col].str.strip(), cadence)
    reasons[(reasons == '') & bad_time] = 'unparseable or misaligned timestamp'

    readings = np.empty((len(frame), len(POLLUTANTS)))
    for col, pollutant in enumerate(POLLUTANTS):
        values, unparseable = _parse_numbers(frame[pollutant])
        reasons[(reasons == '') & unparseable] = 'unparseable {} value'.format(pollutant)
        reasons[(reasons == '') & (values < 0)] = 'negative {} concentration'.format(pollutant)
        readings[:, col] = values

    aqi = None
    if 'AQI' in frame.columns:
        aqi, unparseable = _parse_numbers(frame['AQI'])
        reasons[(reasons == '') & unparseable] = 'unparseable AQI value'
        reasons[(reasons == '') & (aqi < 0)] = 'negative AQI'
        clamped = aqi > AQI_MAX
        if clamped.any():
            diagnostics.count('aqi_clamped', int((clamped & (reasons == '')).sum()))
            aqi = np.where(clamped, AQI_MAX, aqi)

    bands = None
    if 'AQI_Bucket' in frame.columns:
        bands, unknown = _parse_bands(frame['AQI_Bucket'])
        reasons[(reasons == '') & unknown] = 'unknown AQI_Bucket label'

    bad = (reasons != '').to_numpy()
    for line, reason in zip(lines[bad], reasons[bad]):
        diagnostics.reject_row(RowError(int(line), reason))
    if bad.any():
        LOGGER.warning('%d row(s) rejected while parsing %s', int(bad.sum()), source or 'station CSV')

    good = np.flatnonzero(~bad)
    result = []
    for station_id in sorted(set(stations.iloc[good])):
        rows = good[(stations.iloc[good] == station_id).to_numpy()]
        rows = rows[np.argsort(timestamps[rows].to_numpy(), kind='stable')]
        duplicated = timestamps[rows].duplicated(keep='first')
        for row in rows[duplicated]:
            diagnostics.reject_row(RowError(int(lines[row]), 'duplicate timestamp for station {}'.format(station_id)))
        rows = rows[~duplicated]
        result.append(
            _regular_series(station_id, cadence, timestamps[rows], readings[rows],
                            None if aqi is None else aqi[rows], None if bands is None else [bands[r] for r in rows],
                            diagnostics))
    return result


def _first_present(frame, candidates, source):
    for name in candidates:
        if name in frame.columns:
            return name
    raise SchemaError(candidates[0], source)


def _parse_timestamps(texts, cadence):
    parsed = pd.Series(pd.NaT, index=texts.index, dtype='datetime64[ns]')
    for fmt in cadence.accepted_formats:
        todo = parsed.isna()
        if not todo.any():
            break
        parsed[todo] = pd.to_datetime(texts[todo], format=fmt, errors='coerce')
    index = pd.DatetimeIndex(parsed)
    if cadence is Cadence.HOURLY:
        aligned = (index.minute == 0) & (index.second == 0)
    else:
        aligned = index == index.normalize()
    bad = pd.Series(index.isna() | ~aligned, index=texts.index)
    return index, bad


def _to_float(text):
    try:
        return float(text)
    except ValueError:
        return np.nan


def _parse_numbers(texts):
    """Cell-wise ``float`` parsing, so serialised values read back bit for bit."""
    texts = texts.str.strip()
    empty = texts == ''
    values = texts.map(lambda text: np.nan if text == '' else _to_float(text)).to_numpy(dtype=float)
    unparseable = pd.Series((~empty.to_numpy()) & ~np.isfinite(values), index=texts.index)
    values = np.where(empty.to_numpy(), np.nan, values)
    return values, unparseable


def _parse_bands(texts):
    bands = []
    unknown = []
    for text in texts:
        text = text.strip()
        if not text:
            bands.append(None)
            unknown.append(False)
            continue
        try:
            bands.append(AqiBand.from_label(text))
            unknown.append(False)
        except ValueError:
            bands.append(None)
            unknown.append(True)
    return bands, pd.Series(unknown, index=texts.index)


def _regular_series(station_id, cadence, timestamps, readings, aqi, bands, diagnostics):
    """Place the rows of one station on the regular cadence grid, filling gaps with missing rows."""
    full = pd.date_range(timestamps[0], timestamps[-1], freq=cadence.freq)
    positions = full.get_indexer(timestamps)
    inserted = len(full) - len(timestamps)
    if inserted:
        diagnostics.count('gap_rows_inserted', inserted)
        LOGGER.info('station %s: %d missing %s instant(s) inserted', station_id, inserted, cadence.value)
    grid = np.full((len(full), len(POLLUTANTS)), np.nan)
    grid[positions] = readings
    full_aqi = None
    if aqi is not None:
        full_aqi = np.full(len(full), np.nan)
        full_aqi[positions] = aqi
    full_bands = None
    if bands is not None:
        full_bands = [None] * len(full)
        for pos, band in zip(positions, bands):
            full_bands[pos] = band
    return StationSeries(station_id, cadence, full, grid, full_aqi, None if full_bands is None else tuple(full_bands))


def serialize_station_csv(series_list):
    """Render station series back to the CSV schema they were parsed from (bytes)."""
    with_aqi = any(s.aqi is not None or s.band is not None for s in series_list)
    header = ['StationId', 'Datetime'] + list(POLLUTANTS) + (['AQI', 'AQI_Bucket'] if with_aqi else [])
    records = []
    for series in series_list:
        stamps = series.timestamps.strftime(series.cadence.timestamp_format)
        for row in range(len(series)):
            record = [series.station_id, stamps[row]] + [_format_float(v) for v in series.readings[row]]
            if with_aqi:
                record.append('' if series.aqi is None else _format_float(series.aqi[row]))
                band = None if series.band is None else series.band[row]
                record.append('' if band is None else band.label)
            records.append(record)
    frame = pd.DataFrame(records, columns=header)
    return frame.to_csv(index=False, lineterminator='\n').encode('utf-8')


def _format_float(value):
    return '' if np.isnan(value) else '{:.17g}'.format(value)


def impute_missing(series, policy=ImputationPolicy.LINEAR):
    """Fill every missing reading; non-missing cells are left untouched.

    ``linear`` interpolates interior gaps and falls back to forward fill (backward fill on the
    leading edge) at the series edges; ``median`` uses the column median; ``ffill`` carries the
    last value forward (backward on the leading edge).
    """
    policy = ImputationPolicy(policy)
    frame = pd.DataFrame(np.array(series.readings), columns=POLLUTANTS)
    for pollutant in POLLUTANTS:
        if frame[pollutant].isna().all():
            raise ImputationError(series.station_id, pollutant)
    if not frame.isna().any().any():
        return series
    if policy is ImputationPolicy.LINEAR:
        filled = frame.interpolate(method='linear', limit_area='inside').ffill().bfill()
    elif policy is ImputationPolicy.MEDIAN:
        filled = frame.fillna(frame.median())
    else:
        filled = frame.ffill().bfill()
    return replace(series, readings=filled.to_numpy(dtype=float))


def attach_aqi(series, breakpoints, diagnostics=None):
    """Fill unknown AQI values and bands from the (imputed) readings.

    Source AQI values are kept; disagreements larger than one AQI unit with the recomputed
    value are counted under ``aqi_disagreements``.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    computed, _ = compute_aqi_batch(series.readings, breakpoints)
    if series.aqi is None:
        aqi = computed
    else:
        aqi = np.array(series.aqi)
        known = ~np.isnan(aqi) & ~np.isnan(computed)
        disagreements = int((np.abs(aqi[known] - computed[known]) > 1.0).sum())
        if disagreements:
            diagnostics.count('aqi_disagreements', disagreements)
            LOGGER.warning('station %s: %d source AQI value(s) disagree with the recomputed AQI', series.station_id,
                           disagreements)
        aqi = np.where(np.isnan(aqi), computed, aqi)
    derived = breakpoints.bands_of(np.nan_to_num(aqi))
    old = series.band or (None,) * len(series)
    bands = tuple(
        band if band is not None else (None if np.isnan(value) else AqiBand(int(new)))
        for band, value, new in zip(old, aqi, derived))
    return replace(series, aqi=aqi, band=bands)


def build_station_grid(series, pollutant, diagnostics=None):
    """Arrange one pollutant of an imputed series as a Day x Hour grid of complete days.

    Readings of incomplete days are dropped and counted under ``dropped_readings``.
    """
    if pollutant not in POLLUTANTS:
        raise GridError("unknown pollutant '{}'".format(pollutant))
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    values = series.column(pollutant)
    if np.isnan(values).any():
        raise GridError('station {} has missing {} readings; impute first'.format(series.station_id, pollutant))
    hours_per_day = series.cadence.hours_per_day
    days = series.timestamps.normalize()
    table = pd.DataFrame({'day': days, 'hour': series.timestamps.hour if hours_per_day > 1 else 0, 'value': values})
    table = table.pivot(index='day', columns='hour', values='value').reindex(columns=range(hours_per_day))
    complete = table.notna().all(axis=1).to_numpy()
    n_days = int(complete.sum())
    if n_days == 0:
        raise GridError('station {} has no complete day of {} readings'.format(series.station_id, pollutant))
    dropped = len(values) - n_days * hours_per_day
    if dropped:
        diagnostics.count('dropped_readings', dropped)
        LOGGER.info('station %s/%s: %d reading(s) of incomplete days dropped', series.station_id, pollutant, dropped)
    return StationGrid(series.station_id, pollutant, table.to_numpy()[complete], table.index[complete])


def series_from_grids(template, grids, diagnostics=None):
    """Turn one grid per pollutant back into a StationSeries of complete days.

    AQI values and bands are taken from ``template`` at the matching instants; negative grid
    values are clamped at zero and counted under ``clamped_negative``.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    by_name = {grid.pollutant: grid for grid in grids}
    first = by_name[POLLUTANTS[0]]
    hours_per_day = template.cadence.hours_per_day
    offsets = pd.to_timedelta(np.tile(np.arange(hours_per_day), len(first.days)), unit='h')
    timestamps = pd.DatetimeIndex(np.repeat(first.days.to_numpy(), hours_per_day)) + offsets
    readings = np.column_stack([by_name[name].values.reshape(-1) for name in POLLUTANTS])
    negative = int((readings < 0).sum())
    if negative:
        diagnostics.count('clamped_negative', negative)
        readings = np.maximum(readings, 0.0)
    rows = template.timestamps.get_indexer(timestamps)
    aqi = None if template.aqi is None else template.aqi[rows]
    band = None if template.band is None else tuple(template.band[row] for row in rows)
    return StationSeries(template.station_id, template.cadence, timestamps, readings, aqi, band)
