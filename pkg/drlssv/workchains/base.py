# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Base implementation of a chain of stages that communicate through files in an output directory."""

import os
import logging
from contextlib import contextmanager

from drlssv.common import AttributeDict, Diagnostics, DrLssvError, ExitCode, InputValidationError, StageError
from drlssv.common import EXIT_RUNTIME_ERROR

LOGGER = logging.getLogger(__name__)

LOCK_NAME = '.drlssv.lock'


class StageChain(object):
    """Base stage chain

    A sub class lists its steps, in order, in ``_outline`` and implements each as ``run_<step>``;
    every step reads what it needs from the output directory (or from ``self.ctx``) and writes its
    artifacts through :meth:`write_artifact`. A step may return a non-zero :class:`~drlssv.common.ExitCode` to stop
    the chain. While the chain runs an advisory lock file is held in the output directory, and
    when a step fails the artifacts it wrote are removed again. Artifacts of the steps that finished
    before it stay on disk, so the failed step can be rerun on its own once its cause is fixed.

    Each step tallies its events in a fresh ``self.diagnostics``; ``self.totals`` sums the finished steps.

    Exit codes are declared in ``_exit_codes`` and reachable as attributes of ``self.exit_codes``.
    """
    _outline = ()
    _exit_codes = {}

    def __init__(self, config, output_dir=None):
        self.config = config
        self.output_dir = output_dir or config.paths.output_dir
        self.ctx = AttributeDict()
        self.diagnostics = Diagnostics()
        self.totals = Diagnostics()
        self.exit_codes = AttributeDict(
            {label: ExitCode(status, message) for label, (status, message) in self._exit_codes.items()})
        self._written = []

    def report(self, message, *args):
        LOGGER.info('[%s] ' + message, type(self).__name__, *args)

    def path(self, *parts):
        return os.path.join(self.output_dir, *parts)

    def validate_steps(self, steps):
        """Check, before anything is written, that the configuration allows ``steps`` to run."""

    def run(self, steps=None):
        """Run ``steps`` (the whole outline by default) under the output directory lock.

        :raises InputValidationError: when the configuration does not allow the steps to run
        :raises StageError: naming the first step that failed
        """
        steps = tuple(steps or self._outline)
        unknown = [step for step in steps if step not in self._outline]
        if unknown:
            raise InputValidationError('unknown step(s): {}'.format(', '.join(unknown)))
        self.validate_steps(steps)
        os.makedirs(self.output_dir, exist_ok=True)
        with self._lock():
            for step in steps:
                self.report('running step %s', step)
                self._run_step(step)
        return self.ctx

    def _run_step(self, step):
        self._written = []
        self.diagnostics = Diagnostics()
        try:
            exit_code = getattr(self, 'run_' + step)()
        except InputValidationError:
            self._remove_artifacts()
            raise
        except DrLssvError as exc:
            self._remove_artifacts()
            raise StageError(step, ExitCode(exc.exit_status, str(exc))) from exc
        except (IOError, OSError) as exc:
            self._remove_artifacts()
            raise StageError(step, ExitCode(EXIT_RUNTIME_ERROR, str(exc))) from exc
        except Exception:
            self._remove_artifacts()
            raise
        if exit_code is not None and exit_code.status != 0:
            self._remove_artifacts()
            raise StageError(step, exit_code)
        self.totals.update(self.diagnostics)

    def write_artifact(self, relpath, content):
        """Write ``content`` (str or bytes) under the output directory and remember it for clean-up."""
        path = relpath if os.path.isabs(relpath) else self.path(relpath)
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        if isinstance(content, str):
            content = content.encode('utf-8')
        self._written.append(path)
        with open(path, 'wb') as fobj:
            fobj.write(content)
        LOGGER.debug('wrote %s (%d bytes)', path, len(content))
        return path

    def _remove_artifacts(self):
        for path in reversed(self._written):
            if os.path.exists(path):
                os.remove(path)
                LOGGER.debug('removed partial artifact %s', path)
        self._written = []

    @contextmanager
    def _lock(self):
        path = self.path(LOCK_NAME)
        try:
            handle = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise DrLssvError('output directory {} is in use by another run (lock file {})'.format(
                self.output_dir, path))
        try:
            os.write(handle, str(os.getpid()).encode('ascii'))
            os.close(handle)
            yield
        finally:
            if os.path.exists(path):
                os.remove(path)
