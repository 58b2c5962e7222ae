# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Exceptions, exit codes and small containers shared by the whole package"""

from collections import namedtuple

ExitCode = namedtuple('ExitCode', 'status message')
ExitCode.__new__.__defaults__ = (0, None)
"""
A namedtuple describing how a command or stage terminated.

:param status: integer exit status, 0 for success, 1 for runtime/data errors, 2 for usage errors
:param message: optional human readable message
"""

EXIT_OK = ExitCode(0)
EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


class DrLssvError(Exception):
    """Base class of every error raised by drlssv."""

    exit_status = EXIT_RUNTIME_ERROR


class InputValidationError(DrLssvError):
    """Raised when the configuration or the command line is not valid."""

    exit_status = EXIT_USAGE_ERROR


class SchemaError(DrLssvError):
    """Raised when a CSV file lacks a required column."""

    def __init__(self, column, source=None):
        self.column = column
        self.source = source
        where = " in {}".format(source) if source else ""
        super(SchemaError, self).__init__("missing required column '{}'{}".format(column, where))


class RowError(DrLssvError):
    """A rejected CSV row. The parser collects these rather than raising them."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super(RowError, self).__init__("line {}: {}".format(line, reason))


class ImputationError(DrLssvError):
    """Raised when a pollutant column has no value to impute from."""

    def __init__(self, station_id, pollutant):
        self.station_id = station_id
        self.pollutant = pollutant
        super(ImputationError, self).__init__("pollutant '{}' of station '{}' is entirely missing".format(
            pollutant, station_id))


class GridError(DrLssvError):
    """Raised when a station series cannot be arranged as a Day x Hour grid."""


class ModelError(DrLssvError):
    """Raised when a model cannot be fitted or used as requested."""


class NumericalError(DrLssvError):
    """Raised when a linear system cannot be solved reliably."""

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition is not None:
            message = "{} (condition estimate {:.3e})".format(message, condition)
        super(NumericalError, self).__init__(message)


class OutputParsingError(DrLssvError):
    """Raised when a persisted artifact cannot be parsed."""


class StageError(DrLssvError):
    """Raised by the stage chain when one of its steps fails."""

    def __init__(self, stage, exit_code):
        self.stage = stage
        self.exit_code = exit_code
        self.exit_status = exit_code.status
        super(StageError, self).__init__("stage '{}' failed: {}".format(stage, exit_code.message))


class AttributeDict(dict):
    """Dictionary whose keys can also be read and written as attributes."""

    def __getattr__(self, attr):
        try:
            return self[attr]
        except KeyError:
            raise AttributeError("'{}' has no attribute '{}'".format(self.__class__.__name__, attr))

    def __setattr__(self, attr, value):
        self[attr] = value

    def __delattr__(self, attr):
        try:
            del self[attr]
        except KeyError:
            raise AttributeError("'{}' has no attribute '{}'".format(self.__class__.__name__, attr))


class Diagnostics(object):
    """Tally of the non-fatal events met while processing data.

    Counters are keyed by a short tag (e.g. ``skipped_rows``), row errors keep their line
    numbers, and free-text notes are kept in order of appearance.
    """

    def __init__(self):
        self.counters = {}
        self.row_errors = []
        self.notes = []

    def count(self, tag, amount=1):
        self.counters[tag] = self.counters.get(tag, 0) + amount

    def reject_row(self, error):
        self.row_errors.append(error)
        self.count('skipped_rows')

    def note(self, message):
        self.notes.append(message)

    def __getitem__(self, tag):
        return self.counters.get(tag, 0)

    def update(self, other):
        for tag, amount in other.counters.items():
            self.count(tag, amount)
        self.row_errors.extend(other.row_errors)
        self.notes.extend(other.notes)

    def as_dict(self):
        return {
            'counters': dict(sorted(self.counters.items())),
            'row_errors': ['line {}: {}'.format(err.line, err.reason) for err in self.row_errors],
            'notes': list(self.notes),
        }


class AqiError(DrLssvError):
    """Raised for concentrations or AQI tables the index calculation cannot use."""
