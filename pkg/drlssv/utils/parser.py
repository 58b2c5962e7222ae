# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Readers of the persisted artifacts"""

import io

import numpy as np
import pandas as pd

from drlssv.common import ModelError, OutputParsingError
from drlssv.utils.feature_selection import FeatureSelection
from drlssv.utils.hartley import HartleySpectrum
from drlssv.utils.lssv import KernelSpec, LssvModel
from drlssv.utils.render import MODEL_HEADER, REPORT_COLUMNS, SELECTION_COLUMNS

MODEL_KEYS = ('gamma', 'k', 'n', 'bias', 'features', 'offset', 'scale', 'dual')


def _floats(fields, expected, what):
    try:
        values = [float(value) for value in fields]
    except ValueError:
        raise OutputParsingError('non-numeric value in the {} of the model file'.format(what))
    if len(values) != expected:
        raise OutputParsingError('expected {} values for {}, found {}'.format(expected, what, len(values)))
    return values


def parse_model_file(fobj):
    """Parse a model file written by :func:`drlssv.utils.render.render_model`."""
    lines = [line.rstrip('\n') for line in fobj.readlines()]
    lines = [line for line in lines if line.strip()]
    if not lines or lines[0].strip() != MODEL_HEADER:
        raise OutputParsingError('not a model file: the first line must be {}'.format(MODEL_HEADER))
    if len(lines) < 2 + len(MODEL_KEYS):
        raise OutputParsingError('truncated model file')

    kernel_fields = lines[1].split()
    if kernel_fields[0] != 'kernel' or len(kernel_fields) not in (2, 3):
        raise OutputParsingError("malformed kernel line '{}'".format(lines[1]))
    result_dict = {}
    for key, line in zip(MODEL_KEYS, lines[2:2 + len(MODEL_KEYS)]):
        fields = line.split()
        if not fields or fields[0] != key:
            raise OutputParsingError("expected the '{}' line, found '{}'".format(key, line))
        result_dict[key] = fields[1:]

    try:
        k = int(result_dict['k'][0])
        n_rows = int(result_dict['n'][0])
    except (IndexError, ValueError):
        raise OutputParsingError('k and n must be integers')
    rows = lines[2 + len(MODEL_KEYS):]
    if len(rows) != n_rows:
        raise OutputParsingError('expected {} training rows, found {}'.format(n_rows, len(rows)))
    inputs = np.array([_floats(row.split(), k, 'training rows') for row in rows]).reshape(n_rows, k)

    try:
        sigma = float(kernel_fields[2]) if len(kernel_fields) == 3 else None
        kernel = KernelSpec(kernel_fields[1], sigma)
        return LssvModel(training_inputs=inputs,
                         dual=_floats(result_dict['dual'], n_rows, 'dual'),
                         bias=_floats(result_dict['bias'], 1, 'bias')[0],
                         gamma=_floats(result_dict['gamma'], 1, 'gamma')[0],
                         kernel=kernel,
                         offset=_floats(result_dict['offset'], k, 'offset'),
                         scale=_floats(result_dict['scale'], k, 'scale'),
                         feature_names=tuple(result_dict['features']))
    except (ValueError, ModelError) as exc:
        raise OutputParsingError('invalid model file: {}'.format(exc))


def _read_csv(fobj, columns, what):
    try:
        frame = pd.read_csv(io.StringIO(fobj.read()), dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise OutputParsingError('malformed {}: {}'.format(what, exc))
    missing = [name for name in columns if name not in frame.columns]
    if missing:
        raise OutputParsingError('{} lacks the column(s) {}'.format(what, ', '.join(missing)))
    return frame


def parse_selection_csv(fobj):
    frame = _read_csv(fobj, SELECTION_COLUMNS, 'selection CSV')
    try:
        frame = frame.assign(rank=frame['rank'].astype(int)).sort_values('rank')
        scores = tuple(float(value) for value in frame['score'])
        flags = [int(value) for value in frame['selected']]
    except ValueError:
        raise OutputParsingError('non-numeric rank, score or selected flag in the selection CSV')
    ranked = tuple(frame['pollutant'])
    k = sum(flags)
    if flags != [1] * k + [0] * (len(flags) - k):
        raise OutputParsingError('the selected flags must mark the head of the ranking')
    try:
        return FeatureSelection(ranked=ranked, selected=ranked[:k], scores=scores)
    except ValueError as exc:
        raise OutputParsingError('inconsistent selection CSV: {}'.format(exc))


def parse_report_csv(fobj):
    """Rows of a report CSV as dictionaries with numeric fields converted."""
    frame = _read_csv(fobj, REPORT_COLUMNS, 'report CSV')
    rows = []
    try:
        for record in frame.to_dict('records'):
            rows.append({
                'method': record['method'],
                'n': int(record['n']),
                'accuracy': float(record['accuracy']),
                'fpr': float(record['fpr']),
                'forecast_time_ms': float(record['forecast_time_ms']),
                'tau': float(record['tau']),
                'tau_band': record['tau_band'],
                'mae': float(record['mae']),
                'count_time_product': float(record['count_time_product']),
                'n_misclassified': int(record['n_misclassified']),
            })
    except ValueError as exc:
        raise OutputParsingError('malformed report CSV: {}'.format(exc))
    return rows


def parse_spectrum_csv(fobj):
    frame = _read_csv(fobj, ('a', 'b', 'value'), 'spectrum CSV')
    try:
        a_idx = frame['a'].astype(int).to_numpy()
        b_idx = frame['b'].astype(int).to_numpy()
        values = frame['value'].map(float).to_numpy(dtype=float)
    except ValueError:
        raise OutputParsingError('non-numeric entry in the spectrum CSV')
    if len(values) == 0:
        raise OutputParsingError('empty spectrum CSV')
    coefficients = np.zeros((a_idx.max() + 1, b_idx.max() + 1))
    if coefficients.size != len(values):
        raise OutputParsingError('the spectrum CSV does not cover a full P x Q grid')
    coefficients[a_idx, b_idx] = values
    return HartleySpectrum(coefficients)
