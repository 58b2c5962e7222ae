# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""The forecasting pipeline: ingest, preprocess, select, train, evaluate and report"""

import os

import pandas as pd

from drlssv.common import Diagnostics, InputValidationError, ModelError
from drlssv.utils import baselines, evaluation, hartley, parser, render
from drlssv.utils.config import load_yaml
from drlssv.utils.feature_selection import LogisticConfig, build_pools, fit_logistic, homogenize, select_features
from drlssv.utils.ingestion import (AqiBand, AqiBreakpoints, Cadence, POLLUTANTS, attach_aqi, build_station_grid,
                                    impute_missing, read_station_csv, serialize_station_csv, series_from_grids)
from drlssv.utils.lssv import classify_batch
from drlssv.utils.synth import generate
from drlssv.workchains.base import StageChain

REFERENCE_SELECTION = ('PM10', 'CO', 'O3')

IMPUTED = os.path.join('work', 'imputed.csv')
IMPUTED_DAILY = os.path.join('work', 'imputed_daily.csv')
DENOISED = os.path.join('work', 'denoised.csv')
DENOISED_DAILY = os.path.join('work', 'denoised_daily.csv')
DIAGNOSTICS = os.path.join('work', 'diagnostics.yaml')
SELECTION = 'selection.csv'
REPORT = 'report.csv'
PLOTS_DIR = 'plots'
SPECTRA_DIR = os.path.join('work', 'spectra')
SYNTH_HOURLY = 'stations_hourly.csv'
SYNTH_DAILY = 'stations_daily.csv'

# files each step reads from the output directory, and the ones it leaves for later steps
REQUIRES = {
    'ingest': (),
    'preprocess': (IMPUTED, ),
    'select': (DENOISED, ),
    'train': (DENOISED, SELECTION),
    'evaluate': (DENOISED, SELECTION),
    'report': (DENOISED, SELECTION),
}
PRODUCES = {
    'ingest': (IMPUTED, ),
    'preprocess': (DENOISED, ),
    'select': (SELECTION, ),
}


def denoise_series(series_list, keep_fraction, diagnostics=None, spectra=None):
    """Denoise every pollutant grid of every station, one independent transform per grid.

    When ``spectra`` is a list, the spectrum of every grid before thresholding is appended to it.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    config = hartley.DenoiseConfig(keep_fraction)
    denoised = []
    for series in series_list:
        grids = []
        for name in POLLUTANTS:
            grid = build_station_grid(series, name, diagnostics)
            if spectra is not None:
                spectra.append(hartley.dht_forward(grid))
            grids.append(hartley.denoise(grid, config))
        denoised.append(series_from_grids(series, grids, diagnostics))
    return denoised


def spectrum_path(spectrum):
    """Relative path of the exported spectrum of one station grid."""
    return os.path.join(SPECTRA_DIR, '{}_{}.csv'.format(spectrum.station_id, spectrum.pollutant))


class DrLssvPipeline(StageChain):
    """Runs the forecasting stages over one output directory.

    Every step reads its inputs from files written by the steps before it, so running the whole
    outline and running the steps one command at a time give identical artifacts.
    """
    _outline = ('ingest', 'preprocess', 'select', 'train', 'evaluate', 'report')
    _exit_codes = {
        'ERROR_NO_STATIONS': (1, 'the input holds no valid station rows'),
        'ERROR_NOT_CONVERGED': (1, 'the logistic model did not converge; raise selection.max_iter'),
    }

    def validate_steps(self, steps):
        if 'ingest' in steps and not self.config.paths.input:
            raise InputValidationError('paths.input: an input CSV is required to ingest')
        produced = set()
        for step in steps:
            for required in REQUIRES[step]:
                if required not in produced and not os.path.isfile(self.path(required)):
                    raise InputValidationError("step '{}' needs {}; run the earlier steps first".format(
                        step, self.path(required)))
            if step in ('evaluate', 'report') and 'train' not in steps and 'drlssv' in self._methods(step):
                if not os.path.isfile(self.config.paths.model_file):
                    raise InputValidationError("step '{}' needs the model file {}; run train first".format(
                        step, self.config.paths.model_file))
            produced.update(PRODUCES.get(step, ()))

    def _methods(self, step):
        return ('drlssv', ) if step == 'evaluate' else self.config.eval.methods

    @property
    def breakpoints(self):
        if 'breakpoints' not in self.ctx:
            self.ctx.breakpoints = AqiBreakpoints.from_files(self.config.paths.breakpoints, self.config.paths.bands)
        return self.ctx.breakpoints

    @property
    def cadence(self):
        return Cadence(self.config.ingestion.cadence)

    @property
    def uses_daily(self):
        return bool(self.config.paths.daily)

    def _read(self, relpath, cadence):
        return read_station_csv(self.path(relpath), cadence, Diagnostics())

    def _record_diagnostics(self, stage):
        """Merge the counters of ``stage`` into the diagnostics file of the output directory."""
        tally = {}
        if os.path.isfile(self.path(DIAGNOSTICS)):
            with open(self.path(DIAGNOSTICS), 'r') as stream:
                tally = load_yaml(stream, DIAGNOSTICS)
        tally[stage] = self.diagnostics.as_dict()
        self.write_artifact(DIAGNOSTICS, render.render_diagnostics(tally))

    def _selection(self):
        with open(self.path(SELECTION), 'r') as fobj:
            return parser.parse_selection_csv(fobj)

    def _model(self):
        with open(self.config.paths.model_file, 'r') as fobj:
            return parser.parse_model_file(fobj)

    def _split(self, selection):
        samples = evaluation.samples_from_series(self._read(DENOISED, self.cadence), selection.selected)
        settings = self.config.eval
        return evaluation.split_samples(samples, settings.train_fraction, settings.split, settings.seed)

    def run_ingest(self):
        """Parse, impute and attach AQI values to the hourly input (and the optional daily input)."""
        inputs = [(self.config.paths.input, self.cadence, IMPUTED)]
        if self.uses_daily:
            inputs.append((self.config.paths.daily, Cadence.DAILY, IMPUTED_DAILY))
        for source, cadence, target in inputs:
            stations = read_station_csv(source, cadence, self.diagnostics)
            if not stations:
                return self.exit_codes.ERROR_NO_STATIONS  # pylint: disable=no-member
            policy = self.config.ingestion.policy
            imputed = [attach_aqi(impute_missing(s, policy), self.breakpoints, self.diagnostics) for s in stations]
            self.write_artifact(target, serialize_station_csv(imputed))
            self.report('%d station(s) from %s imputed with the %s policy', len(imputed), source, policy)
        if self.diagnostics['skipped_rows']:
            self.report('%d row(s) skipped while parsing', self.diagnostics['skipped_rows'])
        self._record_diagnostics('ingest')
        return None

    def run_preprocess(self):
        """Denoise the imputed series in the Hartley domain."""
        keep_fraction = self.config.hartley.keep_fraction
        spectra = [] if self.config.hartley.export_spectra else None
        hourly = denoise_series(self._read(IMPUTED, self.cadence), keep_fraction, self.diagnostics, spectra)
        self.write_artifact(DENOISED, serialize_station_csv(hourly))
        for spectrum in spectra or ():
            self.write_artifact(spectrum_path(spectrum), render.render_spectrum(spectrum))
        if self.uses_daily and os.path.isfile(self.path(IMPUTED_DAILY)):
            daily = denoise_series(self._read(IMPUTED_DAILY, Cadence.DAILY), keep_fraction, self.diagnostics)
            self.write_artifact(DENOISED_DAILY, serialize_station_csv(daily))
        self.report('denoised %d station(s), keeping %.0f%% of the spectral energy', len(hourly), 100 * keep_fraction)
        self._record_diagnostics('preprocess')

    def run_select(self):
        """Fit the penalised logistic model on the homogenised pools and rank the pollutants."""
        hourly = self._read(DENOISED, self.cadence)
        daily = None
        if self.uses_daily and os.path.isfile(self.path(DENOISED_DAILY)):
            daily = self._read(DENOISED_DAILY, Cadence.DAILY)
        samples = homogenize(*build_pools(hourly, daily))
        settings = self.config.selection
        model = fit_logistic(samples, LogisticConfig(settings.max_iter, settings.tol, settings.ridge))
        if not model.converged:
            return self.exit_codes.ERROR_NOT_CONVERGED  # pylint: disable=no-member
        selection = select_features(model, settings.k)
        self.write_artifact(SELECTION, render.render_selection(selection))
        self.ctx.selection = selection
        self.report('logistic fit converged in %d iteration(s); selected %s (reference set %s)', model.iterations,
                    ', '.join(selection.selected), ', '.join(REFERENCE_SELECTION))
        return None

    def run_train(self):
        """Train the LSSV regressor on the training split of the selected features."""
        selection = self._selection()
        train, _ = self._split(selection)
        forecaster = baselines.make_forecaster('drlssv', self.config, self.breakpoints, selection.selected)
        forecaster.fit(train.features, train.targets)
        if forecaster.n_dropped_:
            self.diagnostics.count('subsampled_rows', forecaster.n_dropped_)
        self.write_artifact(os.path.abspath(self.config.paths.model_file), render.render_model(forecaster.model_))
        self.report('trained on %d of %d training rows', forecaster.model_.n, len(train))

    def run_evaluate(self):
        """Evaluate the persisted model on the whole test split."""
        selection = self._selection()
        _, test = self._split(selection)
        model = self._model()
        if tuple(model.feature_names) != tuple(selection.selected):
            raise ModelError('the model was trained on {} but the selection is {}'.format(
                ', '.join(model.feature_names), ', '.join(selection.selected)))
        forecaster = baselines.LssvForecaster.from_model(model)
        result = evaluation.evaluate(forecaster, test, self.breakpoints, self.config.eval.positive_set,
                                     self.config.eval.tau_window, method_name='drlssv')
        self.write_artifact(REPORT, render.render_report([result]))
        self.write_artifact(os.path.join(PLOTS_DIR, 'forecast.dat'),
                            render.render_forecast(test.targets, forecaster.predict(test.features)))
        self.ctx.reports = [result]
        self.ctx.summary = render.render_summary([result], selection=selection)

    def run_report(self):
        """Sweep the evaluation sizes over every method and write the report CSV and plot data."""
        selection = self._selection()
        train, test = self._split(selection)
        forecasters = {}
        for method in self.config.eval.methods:
            if method == 'drlssv':
                forecasters[method] = baselines.LssvForecaster.from_model(self._model())
            else:
                forecaster = baselines.make_forecaster(method, self.config, self.breakpoints, selection.selected)
                forecasters[method] = forecaster.fit(train.features, train.targets)
        reports = evaluation.sweep_report(forecasters, test, self.config.eval.sizes, self.breakpoints,
                                          self.config.eval.positive_set, self.config.eval.tau_window)
        self.write_artifact(REPORT, render.render_report(reports))
        for metric in sorted(render.PLOT_METRICS):
            self.write_artifact(os.path.join(PLOTS_DIR, '{}.dat'.format(metric)),
                                render.render_plot_data(reports, metric))
        improvements = evaluation.relative_improvement(reports) if 'drlssv' in forecasters else {}
        self.ctx.reports = reports
        self.ctx.improvements = improvements
        self.ctx.summary = render.render_summary(reports, improvements, selection=selection)


class SynthChain(StageChain):
    """Writes a planted synthetic dataset into its output directory."""
    _outline = ('synth', )

    def run_synth(self):
        """Generate the hourly and the native daily station files."""
        breakpoints = AqiBreakpoints.from_files(self.config.paths.breakpoints, self.config.paths.bands)
        dataset = generate(self.config.synth, breakpoints)
        self.ctx.hourly = self.write_artifact(SYNTH_HOURLY, serialize_station_csv(dataset.hourly))
        self.ctx.daily = self.write_artifact(SYNTH_DAILY, serialize_station_csv(dataset.daily))
        self.report('wrote %s and %s', self.ctx.hourly, self.ctx.daily)


def predict_csv(config, input_path):
    """Predicted AQI and band of every row of a station CSV, as CSV text.

    The rows go through the same imputation and denoising as the training data.
    """
    with open(config.paths.model_file, 'r') as fobj:
        model = parser.parse_model_file(fobj)
    unknown = [name for name in model.feature_names if name not in POLLUTANTS]
    if unknown:
        raise ModelError('the model uses unknown features: {}'.format(', '.join(unknown)))
    breakpoints = AqiBreakpoints.from_files(config.paths.breakpoints, config.paths.bands)
    diagnostics = Diagnostics()
    cadence = Cadence(config.ingestion.cadence)
    stations = [impute_missing(s, config.ingestion.policy) for s in read_station_csv(input_path, cadence, diagnostics)]
    columns = [POLLUTANTS.index(name) for name in model.feature_names]
    records = []
    for series in denoise_series(stations, config.hartley.keep_fraction, diagnostics):
        aqi, bands = classify_batch(model, series.readings[:, columns], breakpoints)
        stamps = series.timestamps.strftime(cadence.timestamp_format)
        for stamp, value, band in zip(stamps, aqi, bands):
            records.append([series.station_id, stamp, render.format_float(value), AqiBand(int(band)).label])
    frame = pd.DataFrame(records, columns=['StationId', 'Datetime', 'aqi_pred', 'band'])
    return frame.to_csv(index=False, lineterminator='\n')
