# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Writers of the persisted artifacts: model file, selection and report CSVs, plot data"""

import io

import numpy as np
import pandas as pd
from ruamel.yaml import YAML

from drlssv.utils.lssv import KernelKind

MODEL_HEADER = 'DRLSSV1'
SELECTION_COLUMNS = ('rank', 'pollutant', 'score', 'selected')
REPORT_COLUMNS = ('method', 'n', 'accuracy', 'fpr', 'forecast_time_ms', 'tau', 'tau_band', 'mae', 'count_time_product',
                  'n_misclassified')
PLOT_METRICS = {'accuracy': 'accuracy', 'time': 'forecast_time_ms', 'fpr': 'fpr'}


def format_float(value):
    """17 significant digits, enough to reload the exact double."""
    return '{:.17g}'.format(float(value))


def _floats(values):
    return ' '.join(format_float(value) for value in values)


def _csv(records, columns):
    return pd.DataFrame(records, columns=list(columns)).to_csv(index=False, lineterminator='\n')


def render_model(model):
    """Versioned text rendering of an :class:`~drlssv.utils.lssv.LssvModel`."""
    kernel = 'kernel {}'.format(model.kernel.kind.value)
    if model.kernel.kind is KernelKind.RBF:
        kernel += ' ' + format_float(model.kernel.sigma)
    names = model.feature_names or tuple('x{}'.format(j) for j in range(model.k))
    lines = [
        MODEL_HEADER,
        kernel,
        'gamma {}'.format(format_float(model.gamma)),
        'k {}'.format(model.k),
        'n {}'.format(model.n),
        'bias {}'.format(format_float(model.bias)),
        'features {}'.format(' '.join(names)),
        'offset {}'.format(_floats(model.offset)),
        'scale {}'.format(_floats(model.scale)),
        'dual {}'.format(_floats(model.dual)),
    ]
    lines.extend(_floats(row) for row in model.training_inputs)
    return '\n'.join(lines) + '\n'


def render_selection(selection):
    records = [[rank, name, format_float(score), int(rank <= selection.k)]
               for rank, (name, score) in enumerate(zip(selection.ranked, selection.scores), start=1)]
    return _csv(records, SELECTION_COLUMNS)


def render_report(reports):
    records = []
    for report in reports:
        records.append([
            report.method_name, report.n_samples,
            format_float(report.accuracy),
            format_float(report.fpr),
            format_float(report.forecast_time_ms),
            format_float(report.tau_verdict.tau), report.tau_verdict.band.key,
            format_float(report.mae),
            format_float(report.count_time_product), report.n_misclassified
        ])
    return _csv(records, REPORT_COLUMNS)


def render_plot_data(reports, metric):
    """Whitespace-separated columns ``n`` then one per method, for one metric."""
    attribute = PLOT_METRICS[metric]
    methods = list(dict.fromkeys(report.method_name for report in reports))
    rows = {}
    for report in reports:
        rows.setdefault(report.n_samples, {})[report.method_name] = getattr(report, attribute)
    lines = ['# n ' + ' '.join(methods)]
    for size in sorted(rows):
        values = [format_float(rows[size][name]) if name in rows[size] else 'nan' for name in methods]
        lines.append('{} {}'.format(size, ' '.join(values)))
    return '\n'.join(lines) + '\n'


def render_forecast(observed, predicted):
    lines = ['# index observed predicted']
    for index, (obs, pred) in enumerate(zip(observed, predicted)):
        lines.append('{} {} {}'.format(index, format_float(obs), format_float(pred)))
    return '\n'.join(lines) + '\n'


def render_spectrum(spectrum):
    n_days, n_hours = spectrum.shape
    a_idx, b_idx = np.meshgrid(np.arange(n_days), np.arange(n_hours), indexing='ij')
    records = [[a, b, format_float(value)]
               for a, b, value in zip(a_idx.reshape(-1), b_idx.reshape(-1), spectrum.coefficients.reshape(-1))]
    return _csv(records, ('a', 'b', 'value'))


def render_diagnostics(tally):
    """YAML rendering of per-stage diagnostics, ``{stage: Diagnostics.as_dict()}``."""
    stream = io.StringIO()
    dumper = YAML()
    dumper.default_flow_style = False
    dumper.dump({stage: dict(tally[stage]) for stage in sorted(tally)}, stream)
    return stream.getvalue()


def render_summary(reports=(), improvements=None, selection=None, diagnostics=None):
    """One-screen, human readable summary of a run."""
    lines = []
    if selection is not None:
        lines.append('Selected features: {}'.format(', '.join(selection.selected)))
    if reports:
        lines.append('{:<10} {:>7} {:>9} {:>7} {:>10} {:>7}  {}'.format('method', 'n', 'accuracy', 'fpr', 'time_ms',
                                                                        'tau', 'tau_band'))
        for report in reports:
            lines.append('{:<10} {:>7d} {:>9.4f} {:>7.4f} {:>10.2f} {:>7.3f}  {}'.format(
                report.method_name, report.n_samples, report.accuracy, report.fpr, report.forecast_time_ms,
                report.tau_verdict.tau, report.tau_verdict.band.label))
    if improvements:
        lines.append('Mean improvement of drlssv over:')
        for name, gains in improvements.items():
            lines.append('  {:<10} accuracy {:+.4f}  fpr {:+.4f}  time ratio {:.3f}'.format(
                name, gains['accuracy_gain'], gains['fpr_reduction'], gains['time_ratio']))
    if diagnostics is not None and diagnostics.counters:
        lines.append('Diagnostics: ' + ', '.join('{}={}'.format(tag, count)
                                                 for tag, count in sorted(diagnostics.counters.items())))
    return '\n'.join(lines) + '\n'
