# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Test the pipeline end to end through the command line"""

import io
import os
import time

import numpy as np
import pandas as pd
import pytest

from drlssv.cli import COMMANDS, build_parser, main
from drlssv.utils.hartley import dht_forward
from drlssv.utils.ingestion import build_station_grid, parse_station_csv
from drlssv.utils.parser import parse_model_file, parse_report_csv, parse_selection_csv, parse_spectrum_csv
from drlssv.workchains.base import LOCK_NAME
from drlssv.workchains.pipeline import REFERENCE_SELECTION, SPECTRA_DIR

ARTIFACTS = ('selection.csv', 'model.drlssv', 'report.csv', os.path.join('plots', 'accuracy.dat'),
             os.path.join('plots', 'time.dat'), os.path.join('plots', 'fpr.dat'), os.path.join('plots', 'forecast.dat'),
             os.path.join('work', 'denoised.csv'), os.path.join('work', 'diagnostics.yaml'))
STEPS = ('ingest', 'preprocess', 'select', 'train', 'evaluate', 'report')
TIMING_COLUMNS = ['forecast_time_ms', 'count_time_product']

pytestmark = pytest.mark.slow


def pipeline_args(data_dir, output_dir, *extra, protocol='quick'):
    return [
        '--protocol', protocol, '--set', 'paths.input={}'.format(os.path.join(data_dir, 'stations_hourly.csv')), '--set',
        'paths.daily={}'.format(os.path.join(data_dir, 'stations_daily.csv')), '--set',
        'paths.output_dir={}'.format(output_dir)
    ] + list(extra)


def read_bytes(*parts):
    with open(os.path.join(*parts), 'rb') as fobj:
        return fobj.read()


@pytest.fixture(scope='module')
def synth_dir(tmp_path_factory):
    """The quick protocol's synthetic station files."""
    directory = str(tmp_path_factory.mktemp('synth'))
    assert main(['--protocol', 'quick', 'synth', '--out', directory]) == 0
    return directory


@pytest.fixture(scope='module')
def full_run(synth_dir, tmp_path_factory):
    """Output directory of one complete ``run``."""
    directory = str(tmp_path_factory.mktemp('run'))
    assert main(pipeline_args(synth_dir, directory, 'run')) == 0
    return directory


def test_every_command_has_help():
    parser = build_parser()
    for command in COMMANDS:
        with pytest.raises(SystemExit) as excinfo:
            parser.parse_args([command, '--help'])
        assert excinfo.value.code == 0


def test_invalid_flags_exit_2(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(['bogus'])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(['--seed', 'abc', 'run'])
    assert excinfo.value.code == 2
    assert not os.listdir(str(tmp_path))


def test_synth_is_reproducible(synth_dir, tmp_path):
    assert main(['--protocol', 'quick', 'synth', '--out', str(tmp_path)]) == 0
    for name in ('stations_hourly.csv', 'stations_daily.csv'):
        assert read_bytes(str(tmp_path), name) == read_bytes(synth_dir, name)
    frame = pd.read_csv(os.path.join(synth_dir, 'stations_hourly.csv'))
    assert len(frame) == 3 * 30 * 24
    assert sorted(frame['StationId'].unique()) == ['SYN001', 'SYN002', 'SYN003']


def test_run_writes_every_artifact(full_run):
    for artifact in ARTIFACTS:
        assert os.path.isfile(os.path.join(full_run, artifact)), artifact
    assert not os.path.exists(os.path.join(full_run, LOCK_NAME))


def test_run_selects_the_planted_pollutants(full_run):
    with open(os.path.join(full_run, 'selection.csv')) as fobj:
        selection = parse_selection_csv(fobj)
    assert set(selection.selected) == set(REFERENCE_SELECTION)
    with open(os.path.join(full_run, 'model.drlssv')) as fobj:
        model = parse_model_file(fobj)
    assert model.feature_names == selection.selected
    assert model.n == 800


def test_run_report(full_run):
    with open(os.path.join(full_run, 'report.csv')) as fobj:
        rows = parse_report_csv(fobj)
    assert [(row['n'], row['method']) for row in rows] == [(size, method) for size in (250, 500)
                                                           for method in ('drlssv', 'ridge', 'knn', 'majority')]
    by_method = {row['method']: row for row in rows if row['n'] == 500}
    assert by_method['drlssv']['accuracy'] >= 0.9
    assert by_method['drlssv']['accuracy'] >= by_method['majority']['accuracy'] + 0.2
    for row in rows:
        assert 0.0 <= row['accuracy'] <= 1.0
        assert 0.0 <= row['fpr'] <= 1.0
        assert -1.0 <= row['tau'] <= 1.0
    with open(os.path.join(full_run, 'plots', 'accuracy.dat')) as fobj:
        lines = fobj.read().splitlines()
    assert lines[0] == '# n drlssv ridge knn majority'
    assert [line.split()[0] for line in lines[1:]] == ['250', '500']


def test_steps_match_run(synth_dir, full_run, tmp_path):
    output_dir = str(tmp_path / 'steps')
    for step in STEPS:
        assert main(pipeline_args(synth_dir, output_dir, step)) == 0, step
    for artifact in ARTIFACTS:
        if artifact == 'report.csv' or artifact.startswith('plots' + os.sep + 'time'):
            continue
        assert read_bytes(output_dir, artifact) == read_bytes(full_run, artifact), artifact
    stepwise = pd.read_csv(os.path.join(output_dir, 'report.csv')).drop(columns=TIMING_COLUMNS)
    whole = pd.read_csv(os.path.join(full_run, 'report.csv')).drop(columns=TIMING_COLUMNS)
    pd.testing.assert_frame_equal(stepwise, whole)


def test_summary_on_stdout(synth_dir, tmp_path, capsys):
    output_dir = str(tmp_path / 'out')
    for step in STEPS[:4]:
        assert main(pipeline_args(synth_dir, output_dir, step)) == 0
    capsys.readouterr()
    assert main(pipeline_args(synth_dir, output_dir, 'evaluate')) == 0
    out = capsys.readouterr().out
    assert 'Selected features:' in out
    assert 'drlssv' in out
    with open(os.path.join(output_dir, 'report.csv')) as fobj:
        assert [row['method'] for row in parse_report_csv(fobj)] == ['drlssv']


def test_bad_keep_fraction_exits_2_without_output(synth_dir, tmp_path, capsys):
    output_dir = str(tmp_path / 'never')
    assert main(pipeline_args(synth_dir, output_dir, '--set', 'hartley.keep_fraction=1.5', 'run')) == 2
    assert 'hartley.keep_fraction' in capsys.readouterr().err
    assert not os.path.exists(output_dir)


def test_late_flags_win(synth_dir, tmp_path, capsys):
    output_dir = str(tmp_path / 'never')
    assert main(pipeline_args(synth_dir, output_dir, 'run', '--set', 'selection.k=9')) == 2
    assert 'selection.k' in capsys.readouterr().err
    assert not os.path.exists(output_dir)


def test_show_config(tmp_path, capsys):
    output_dir = str(tmp_path / 'never')
    assert main(['--protocol', 'quick', 'run', '--show-config', '--set', 'paths.output_dir={}'.format(output_dir)]) == 0
    out = capsys.readouterr().out
    assert out.startswith('# Generated by drlssv')
    assert 'keep_fraction: 0.95' in out
    assert not os.path.exists(output_dir)


def test_evaluate_without_model(synth_dir, tmp_path, capsys):
    output_dir = str(tmp_path / 'empty')
    assert main(pipeline_args(synth_dir, output_dir, 'evaluate')) == 2
    assert 'run the earlier steps first' in capsys.readouterr().err


def test_not_converged_exits_1(synth_dir, tmp_path, capsys):
    output_dir = str(tmp_path / 'out')
    for step in STEPS[:2]:
        assert main(pipeline_args(synth_dir, output_dir, step)) == 0
    assert main(pipeline_args(synth_dir, output_dir, '--set', 'selection.max_iter=1', 'select')) == 1
    assert 'select' in capsys.readouterr().err
    assert not os.path.exists(os.path.join(output_dir, 'selection.csv'))
    assert not os.path.exists(os.path.join(output_dir, LOCK_NAME))


def test_lock_refuses_concurrent_runs(synth_dir, tmp_path, capsys):
    output_dir = tmp_path / 'locked'
    output_dir.mkdir()
    (output_dir / LOCK_NAME).write_text('12345')
    assert main(pipeline_args(synth_dir, str(output_dir), 'ingest')) == 1
    assert 'in use' in capsys.readouterr().err
    assert (output_dir / LOCK_NAME).exists()
    assert not (output_dir / 'work').exists()


def test_predict(synth_dir, full_run, capsys):
    capsys.readouterr()
    assert main(pipeline_args(synth_dir, full_run, 'predict', '--input',
                              os.path.join(synth_dir, 'stations_hourly.csv'))) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(frame.columns) == ['StationId', 'Datetime', 'aqi_pred', 'band']
    assert len(frame) == 3 * 30 * 24
    assert frame['aqi_pred'].between(0, 500).all()
    assert set(frame['band']) <= {'Good', 'Satisfactory', 'Moderate', 'Poor', 'Very Poor', 'Severe'}


def test_noiseless_data_is_learnt(tmp_path):
    data_dir = str(tmp_path / 'data')
    output_dir = str(tmp_path / 'out')
    clean = ['--set', 'synth.noise_sd=0', '--set', 'synth.spike_rate=0']
    assert main(['--protocol', 'quick'] + clean + ['synth', '--out', data_dir]) == 0
    assert main(pipeline_args(data_dir, output_dir, 'run')) == 0
    with open(os.path.join(output_dir, 'report.csv')) as fobj:
        rows = parse_report_csv(fobj)
    drlssv = [row for row in rows if row['method'] == 'drlssv']
    assert [row['accuracy'] for row in drlssv] == [1.0, 1.0]


def test_rerun_is_byte_identical(synth_dir, full_run, tmp_path):
    output_dir = str(tmp_path / 'again')
    assert main(pipeline_args(synth_dir, output_dir, 'run')) == 0
    for artifact in ('selection.csv', 'model.drlssv'):
        assert read_bytes(output_dir, artifact) == read_bytes(full_run, artifact), artifact


def test_spectra_export(synth_dir, tmp_path):
    output_dir = str(tmp_path / 'out')
    assert main(pipeline_args(synth_dir, output_dir, 'ingest')) == 0
    assert main(pipeline_args(synth_dir, output_dir, '--set', 'hartley.export_spectra=true', 'preprocess')) == 0
    spectra = sorted(os.listdir(os.path.join(output_dir, SPECTRA_DIR)))
    assert len(spectra) == 3 * 7
    assert 'SYN001_PM2.5.csv' in spectra
    with open(os.path.join(output_dir, SPECTRA_DIR, 'SYN002_PM10.csv')) as fobj:
        spectrum = parse_spectrum_csv(fobj)
    assert spectrum.shape == (30, 24)
    with open(os.path.join(output_dir, 'work', 'imputed.csv'), 'rb') as fobj:
        station = [series for series in parse_station_csv(fobj.read(), 'hourly') if series.station_id == 'SYN002'][0]
    np.testing.assert_allclose(spectrum.coefficients, dht_forward(build_station_grid(station, 'PM10')).coefficients)


def test_failed_run_keeps_finished_steps(synth_dir, tmp_path):
    output_dir = str(tmp_path / 'out')
    assert main(pipeline_args(synth_dir, output_dir, '--set', 'selection.max_iter=1', 'run')) == 1
    assert os.path.isfile(os.path.join(output_dir, 'work', 'imputed.csv'))
    assert os.path.isfile(os.path.join(output_dir, 'work', 'denoised.csv'))
    assert not os.path.exists(os.path.join(output_dir, LOCK_NAME))
    assert not os.path.exists(os.path.join(output_dir, 'selection.csv'))
    assert main(pipeline_args(synth_dir, output_dir, 'select')) == 0
    with open(os.path.join(output_dir, 'selection.csv')) as fobj:
        assert set(parse_selection_csv(fobj).selected) == set(REFERENCE_SELECTION)


def test_default_protocol_at_full_scale(tmp_path):
    """Five stations over 120 days, evaluated on 2000 test samples."""
    data_dir = str(tmp_path / 'data')
    output_dir = str(tmp_path / 'out')
    assert main(['--protocol', 'default', 'synth', '--out', data_dir]) == 0
    start = time.perf_counter()
    assert main(pipeline_args(data_dir, output_dir, 'run', protocol='default')) == 0
    assert time.perf_counter() - start < 60.0
    with open(os.path.join(output_dir, 'selection.csv')) as fobj:
        assert set(parse_selection_csv(fobj).selected) == set(REFERENCE_SELECTION)
    with open(os.path.join(output_dir, 'report.csv')) as fobj:
        rows = {row['method']: row for row in parse_report_csv(fobj)}
    assert rows['drlssv']['n'] == 2000
    assert rows['drlssv']['accuracy'] >= 0.95
    assert rows['drlssv']['fpr'] <= 0.05
    assert rows['drlssv']['forecast_time_ms'] < 1000.0
