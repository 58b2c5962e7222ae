# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Command line interface: ``drlssv [global flags] <command> [options]``"""

import argparse
import logging
import sys

from drlssv import __version__
from drlssv.common import EXIT_OK, EXIT_RUNTIME_ERROR, DrLssvError, InputValidationError, StageError
from drlssv.utils.config import DEFAULT_PROTOCOL, build_config
from drlssv.utils.render import render_summary
from drlssv.workchains.pipeline import DrLssvPipeline, SynthChain, predict_csv

LOGGER = logging.getLogger(__name__)

COMMANDS = {
    'ingest': 'Parse, validate and impute station CSVs; attach AQI values and bands.',
    'synth': 'Generate a planted synthetic station dataset.',
    'preprocess': 'Build Day x Hour grids and denoise them with the Hartley transform.',
    'select': 'Fit the penalised logistic model and rank pollutant features.',
    'train': 'Train the least-squares SVM on the selected features.',
    'predict': 'Predict AQI values and bands for a station CSV with a trained model.',
    'evaluate': 'Evaluate the trained model on the test split and write report.csv.',
    'report': 'Sweep sizes x methods; write report.csv and plots/.',
    'run': 'Execute ingest, preprocess, select, train, evaluate and report.',
}
SUMMARY_COMMANDS = ('evaluate', 'report', 'run')
LATE = 'late_'


def _add_global_flags(parser, late=False):
    """Global flags; after the command they land in ``late_*`` destinations and win over earlier ones."""
    prefix = LATE if late else ''
    default = argparse.SUPPRESS if late else None
    parser.add_argument('--config', dest=prefix + 'config', metavar='PATH', default=default,
                        help='YAML configuration file layered over the protocol')
    parser.add_argument('--protocol', dest=prefix + 'protocol', metavar='TAG', default=default,
                        help='bundled protocol to start from (default: {})'.format(DEFAULT_PROTOCOL))
    parser.add_argument('--set', dest=prefix + 'set', metavar='KEY=VALUE', action='append',
                        default=default, help='override one configuration value, e.g. hartley.keep_fraction=0.9')
    parser.add_argument('--seed', dest=prefix + 'seed', metavar='U64', type=int, default=default,
                        help='seed of the evaluation split and the synthetic generator')
    parser.add_argument('--verbose', '-v', dest=prefix + 'verbose', action='count', default=default,
                        help='INFO logging; repeat for DEBUG')
    parser.add_argument('--show-config', dest=prefix + 'show_config', action='store_true', default=default,
                        help='print the effective configuration and exit')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='drlssv', description='Air quality forecasting with Hartley denoising, logistic feature selection '
        'and a least-squares SVM.')
    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    _add_global_flags(parser)
    subparsers = parser.add_subparsers(dest='command', metavar='<command>')
    subparsers.required = True
    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        _add_global_flags(sub, late=True)
        if name == 'synth':
            sub.add_argument('--out', required=True, metavar='DIR', help='directory receiving the station CSVs')
        elif name == 'predict':
            sub.add_argument('--input', required=True, metavar='CSV', help='station CSV to predict')
    return parser


def _merge_late_flags(args):
    """Fold the flags given after the command into the ones given before it."""
    options = vars(args)
    for key in [key for key in options if key.startswith(LATE)]:
        value = options.pop(key)
        name = key[len(LATE):]
        if name == 'set':
            options['set'] = (options['set'] or []) + value
        elif name == 'verbose':
            options['verbose'] = (options['verbose'] or 0) + value
        elif name == 'show_config':
            options['show_config'] = options['show_config'] or value
        else:
            options[name] = value
    return args


def setup_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity or 0, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s', force=True)


def execute(args, stdout=None):
    """Run a parsed command; returns the process exit status.

    :raises DrLssvError: for data, model and configuration failures
    """
    stdout = stdout or sys.stdout
    config = build_config(protocol=args.protocol or DEFAULT_PROTOCOL, config_path=args.config,
                          overrides=args.set or (), seed=args.seed)
    if args.show_config:
        stdout.write(config.render())
        return EXIT_OK.status

    if args.command == 'synth':
        SynthChain(config, output_dir=args.out).run()
        return EXIT_OK.status
    if args.command == 'predict':
        stdout.write(predict_csv(config, args.input))
        return EXIT_OK.status

    pipeline = DrLssvPipeline(config)
    ctx = pipeline.run(None if args.command == 'run' else [args.command])
    if args.command in SUMMARY_COMMANDS and 'summary' in ctx:
        stdout.write(ctx.summary)
        if pipeline.totals.counters:
            stdout.write(render_summary(diagnostics=pipeline.totals))
    return EXIT_OK.status


def main(argv=None):
    """Console entry point."""
    args = _merge_late_flags(build_parser().parse_args(argv))
    setup_logging(args.verbose)
    try:
        return execute(args)
    except InputValidationError as exc:
        sys.stderr.write('drlssv: error: {}\n'.format(exc))
        return exc.exit_status
    except StageError as exc:
        sys.stderr.write('drlssv: {}\n'.format(exc))
        return exc.exit_status or EXIT_RUNTIME_ERROR
    except DrLssvError as exc:
        sys.stderr.write('drlssv: {}: {}\n'.format(args.command, exc))
        return exc.exit_status
    except (IOError, OSError) as exc:
        sys.stderr.write('drlssv: {}: {}\n'.format(args.command, exc))
        return EXIT_RUNTIME_ERROR


if __name__ == '__main__':
    sys.exit(main())
