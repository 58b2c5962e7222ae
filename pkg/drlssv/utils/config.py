# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Pipeline configuration: YAML protocols, layered overrides and validation"""

import io
import os
import logging
from collections.abc import Mapping, Sequence
from copy import deepcopy
from dataclasses import asdict, dataclass, field, fields

from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from drlssv.common import InputValidationError
from drlssv.utils.baselines import METHODS
from drlssv.utils.evaluation import SPLITS, TAU_WINDOWS
from drlssv.utils.ingestion import AqiBand, Cadence, ImputationPolicy, PROTOCOLS_DIR, POLLUTANTS
from drlssv.utils.lssv import KernelKind
from drlssv.utils.synth import SynthSpec

LOGGER = logging.getLogger(__name__)

DEFAULT_PROTOCOL = 'default'
U64_MAX = 2**64 - 1


def merge_dict(dct, merge_dct):
    """Recursive dict merge. Inspired by :meth:``dict.update()``, instead of updating only
    top-level keys, merge_dict recurses down into dicts nested to an arbitrary depth, updating keys.
    The ``merge_dct`` is merged into ``dct``.

    :param dct: dict onto which the merge is executed
    :param merge_dct: dct merged into dct (overwrites dct data if in both)
    :return: None
    """
    for k, _ in merge_dct.items():
        if k in dct and isinstance(dct[k], dict) and isinstance(merge_dct[k], Mapping):
            merge_dict(dct[k], merge_dct[k])
        else:
            dct[k] = merge_dct[k]


def _yaml():
    return YAML(typ='safe', pure=True)


def load_yaml(stream, source='configuration'):
    try:
        content = _yaml().load(stream)
    except YAMLError as exc:
        raise InputValidationError('{} is not valid YAML: {}'.format(source, exc))
    if content is None:
        return {}
    if not isinstance(content, Mapping):
        raise InputValidationError('{} must be a mapping of sections'.format(source))
    return dict(content)


def protocol_path(tag):
    return os.path.join(PROTOCOLS_DIR, '{}.yaml'.format(tag))


def load_protocol(tag=DEFAULT_PROTOCOL):
    """Read a bundled protocol, selected by its tag."""
    path = protocol_path(tag)
    if not os.path.isfile(path):
        available = sorted(name[:-5] for name in os.listdir(PROTOCOLS_DIR) if name.endswith('.yaml'))
        raise InputValidationError("unknown protocol '{}', available: {}".format(tag, ', '.join(available)))
    with open(path, 'r') as stream:
        return load_yaml(stream, 'protocol {}'.format(tag))


def load_config_file(path):
    try:
        with open(path, 'r') as stream:
            return load_yaml(stream, path)
    except (IOError, OSError) as exc:
        raise InputValidationError('cannot read configuration file {}: {}'.format(path, exc))


class ConfigTree:
    """Nested configuration dictionary addressed by dotted keyword paths."""

    DISCLAIMER = '# Generated by drlssv'

    def __init__(self, params=None):
        if not params:
            self._params = {}
        else:
            # always make a full copy so that add_keyword() leaves the passed-in dictionary alone
            self._params = deepcopy(params)

    def __getitem__(self, key):
        return self._params[key]

    def as_dict(self):
        return deepcopy(self._params)

    def add_keyword(self, kwpath, value, override=True):
        """
        Add a value for the given keyword.

        Args:
            kwpath: a single keyword, a path with `.` as divider for sections & key,
                    or a sequence with sections and key
            value: the value to set the given key to
            override: whether to override the key if it is already present
        """
        if isinstance(kwpath, str):
            kwpath = kwpath.split('.')
        if not all(kwpath):
            raise InputValidationError('empty section or key in keyword path {}'.format('.'.join(kwpath)))
        ConfigTree._add_keyword(kwpath, value, self._params, override)

    def render(self):
        """YAML rendering, sections in canonical order."""
        stream = io.StringIO()
        dumper = YAML()
        dumper.default_flow_style = False
        dumper.dump(_plain(self._params), stream)
        return u'\n'.join([self.DISCLAIMER, stream.getvalue()])

    @staticmethod
    def _add_keyword(kwpath, value, params, ovrd):
        """Add keyword into the given nested dictionary"""
        # key/value for the deepest level
        if len(kwpath) == 1:
            if ovrd or kwpath[0] not in params:
                params[kwpath[0]] = value

        # the key was not present and we are not yet at the deepest level: add a subdictionary
        elif kwpath[0] not in params:
            params[kwpath[0]] = {}
            ConfigTree._add_keyword(kwpath[1:], value, params[kwpath[0]], ovrd)

        # the key does NOT point to a dictionary: replace it unless ovrd is False
        elif not isinstance(params[kwpath[0]], Mapping):
            if ovrd:
                params[kwpath[0]] = {}
                ConfigTree._add_keyword(kwpath[1:], value, params[kwpath[0]], ovrd)
        else:
            ConfigTree._add_keyword(kwpath[1:], value, params[kwpath[0]], ovrd)


def _plain(value):
    if isinstance(value, Mapping):
        return {key: _plain(val) for key, val in value.items()}
    if isinstance(value, (frozenset, set)):
        return [_plain(val) for val in sorted(value)]
    if isinstance(value, Sequence) and not isinstance(value, str):
        return [_plain(val) for val in value]
    if isinstance(value, AqiBand):
        return value.key
    return value


def parse_set_option(option):
    """``section.key=value`` with the value read as a YAML scalar or flow sequence."""
    if '=' not in option:
        raise InputValidationError("--set expects section.key=value, got '{}'".format(option))
    path, text = option.split('=', 1)
    path = path.strip()
    if '.' not in path:
        raise InputValidationError("--set key '{}' must name a section and a key".format(path))
    try:
        value = _yaml().load(text) if text.strip() else None
    except YAMLError:
        raise InputValidationError("cannot parse the value of --set {}".format(path))
    return path, value


@dataclass(frozen=True)
class PathsConfig:
    input: str = None
    daily: str = None
    breakpoints: str = None
    bands: str = None
    model: str = None
    output_dir: str = 'drlssv_output'

    @property
    def model_file(self):
        return self.model or os.path.join(self.output_dir, 'model.drlssv')


@dataclass(frozen=True)
class IngestionConfig:
    cadence: str = 'hourly'
    policy: str = 'linear'


@dataclass(frozen=True)
class HartleyConfig:
    keep_fraction: float = 0.95
    export_spectra: bool = False


@dataclass(frozen=True)
class SelectionConfig:
    k: int = 3
    ridge: float = 1e-4
    max_iter: int = 100
    tol: float = 1e-8


@dataclass(frozen=True)
class LssvConfig:
    kernel: str = 'rbf'
    sigma: object = 'median'
    gamma: float = 10.0
    cap_n: int = 5000


@dataclass(frozen=True)
class EvalConfig:
    positive_set: frozenset = frozenset((AqiBand.POOR, AqiBand.VERY_POOR, AqiBand.SEVERE))
    split: str = 'chronological'
    train_fraction: float = 0.7
    seed: int = 42
    tau_window: str = 'station'
    sizes: tuple = (2000,)
    methods: tuple = ('drlssv', 'ridge', 'knn')
    knn_k: int = 5
    ridge_alpha: float = 1.0


@dataclass(frozen=True)
class PipelineConfig:
    """Validated configuration of every stage."""
    paths: PathsConfig = field(default_factory=PathsConfig)
    ingestion: IngestionConfig = field(default_factory=IngestionConfig)
    hartley: HartleyConfig = field(default_factory=HartleyConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    lssv: LssvConfig = field(default_factory=LssvConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    synth: SynthSpec = field(default_factory=SynthSpec)

    def as_dict(self):
        return _plain({item.name: asdict(getattr(self, item.name)) for item in fields(self)})

    def render(self):
        return ConfigTree(self.as_dict()).render()


SECTIONS = {item.name: item.type for item in fields(PipelineConfig)}
OPTIONAL_TOP_KEYS = ('protocol_description',)


def _fail(path, message):
    raise InputValidationError('{}: {}'.format(path, message))


def _number(path, value, low=None, high=None, low_open=False, high_open=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, 'expected a number, got {!r}'.format(value))
    if integer and (not isinstance(value, int) and not float(value).is_integer()):
        _fail(path, 'expected an integer, got {!r}'.format(value))
    value = int(value) if integer else float(value)
    if low is not None and (value < low or (low_open and value == low)):
        _fail(path, 'must be {} {}, got {}'.format('>' if low_open else '>=', low, value))
    if high is not None and (value > high or (high_open and value == high)):
        _fail(path, 'must be {} {}, got {}'.format('<' if high_open else '<=', high, value))
    return value


def _choice(path, value, choices):
    if value not in choices:
        _fail(path, 'must be one of {}, got {!r}'.format(', '.join(choices), value))
    return value


def _optional_path(path, value):
    if value is not None and not isinstance(value, str):
        _fail(path, 'expected a file path, got {!r}'.format(value))
    return value


def _string_list(path, value):
    if isinstance(value, str) or not isinstance(value, Sequence):
        _fail(path, 'expected a list, got {!r}'.format(value))
    return list(value)


def _validate_section(name, values):  # pylint: disable=too-many-return-statements,too-many-branches
    if name == 'paths':
        checked = {key: _optional_path('paths.' + key, val) for key, val in values.items()}
        if checked.get('output_dir', 'x') is None:
            _fail('paths.output_dir', 'must be set')
        return checked
    if name == 'ingestion':
        checked = dict(values)
        if 'cadence' in values:
            _choice('ingestion.cadence', values['cadence'], [c.value for c in Cadence])
        if 'policy' in values:
            _choice('ingestion.policy', values['policy'], [p.value for p in ImputationPolicy])
        return checked
    if name == 'hartley':
        checked = dict(values)
        if 'keep_fraction' in values:
            checked['keep_fraction'] = _number('hartley.keep_fraction', values['keep_fraction'], 0.0, 1.0,
                                               low_open=True)
        if not isinstance(values.get('export_spectra', False), bool):
            _fail('hartley.export_spectra', 'expected true or false, got {!r}'.format(values['export_spectra']))
        return checked
    if name == 'selection':
        checks = {
            'k': lambda v: _number('selection.k', v, 1, len(POLLUTANTS), integer=True),
            'ridge': lambda v: _number('selection.ridge', v, 0.0),
            'max_iter': lambda v: _number('selection.max_iter', v, 1, integer=True),
            'tol': lambda v: _number('selection.tol', v, 0.0, low_open=True),
        }
        return {key: checks[key](val) for key, val in values.items()}
    if name == 'lssv':
        checked = {}
        for key, val in values.items():
            if key == 'kernel':
                checked[key] = _choice('lssv.kernel', val, [k.value for k in KernelKind])
            elif key == 'sigma':
                checked[key] = val if val == 'median' else _number('lssv.sigma', val, 0.0, low_open=True)
            elif key == 'gamma':
                checked[key] = _number('lssv.gamma', val, 0.0, low_open=True)
            else:
                checked[key] = _number('lssv.cap_n', val, 1, integer=True)
        return checked
    if name == 'eval':
        return _validate_eval(values)
    return _validate_synth(values)


def _validate_eval(values):  # pylint: disable=too-many-branches
    checked = {}
    for key, val in values.items():
        path = 'eval.' + key
        if key == 'positive_set':
            try:
                bands = frozenset(AqiBand.from_label(str(label)) for label in _string_list(path, val))
            except ValueError as exc:
                _fail(path, str(exc))
            if not bands or len(bands) >= len(AqiBand):
                _fail(path, 'must be a non-empty proper subset of the six bands')
            checked[key] = bands
        elif key == 'split':
            checked[key] = _choice(path, val, SPLITS)
        elif key == 'train_fraction':
            checked[key] = _number(path, val, 0.0, 1.0, low_open=True, high_open=True)
        elif key == 'seed':
            checked[key] = _number(path, val, 0, U64_MAX, integer=True)
        elif key == 'tau_window':
            checked[key] = _choice(path, val, TAU_WINDOWS)
        elif key == 'sizes':
            sizes = tuple(_number(path, size, 1, integer=True) for size in _string_list(path, val))
            if not sizes or any(nxt <= prev for prev, nxt in zip(sizes[:-1], sizes[1:])):
                _fail(path, 'must be a non-empty, strictly ascending list')
            checked[key] = sizes
        elif key == 'methods':
            methods = tuple(_choice(path, method, METHODS) for method in _string_list(path, val))
            if not methods or len(set(methods)) != len(methods):
                _fail(path, 'must list distinct methods')
            checked[key] = methods
        elif key == 'knn_k':
            checked[key] = _number(path, val, 1, integer=True)
        else:
            checked[key] = _number(path, val, 0.0)
    return checked


def _validate_synth(values):
    checked = {}
    for key, val in values.items():
        path = 'synth.' + key
        if key in ('n_stations', 'days'):
            checked[key] = _number(path, val, 1, integer=True)
        elif key == 'seed':
            checked[key] = _number(path, val, 0, U64_MAX, integer=True)
        elif key == 'planted':
            checked[key] = tuple(_choice(path, name, POLLUTANTS) for name in _string_list(path, val))
        elif key == 'spike_rate':
            checked[key] = _number(path, val, 0.0, 1.0)
        elif key == 'diurnal_amplitude':
            checked[key] = _number(path, val, 0.0, 1.0, high_open=True)
        else:
            checked[key] = _number(path, val, 0.0)
    return checked


def validate(tree):
    """Turn a configuration mapping into a :class:`PipelineConfig`, rejecting unknown keys."""
    sections = {}
    for name, values in tree.items():
        if name in OPTIONAL_TOP_KEYS:
            continue
        if name not in SECTIONS:
            _fail(name, 'unknown configuration section')
        if values is None:
            continue
        if not isinstance(values, Mapping):
            _fail(name, 'a section must be a mapping of keys')
        known = {item.name for item in fields(SECTIONS[name])}
        for key in values:
            if key not in known:
                _fail('{}.{}'.format(name, key), 'unknown configuration key')
        sections[name] = SECTIONS[name](**_validate_section(name, values))
    return PipelineConfig(**sections)


def build_config(protocol=DEFAULT_PROTOCOL, config_path=None, overrides=(), seed=None):
    """Layer protocol < configuration file < ``--set`` overrides < ``--seed`` and validate.

    :param overrides: ``section.key=value`` strings
    :param seed: when given, the seed of both the evaluation split and the generator
    """
    tree = ConfigTree(load_protocol(protocol))
    if config_path:
        merged = tree.as_dict()
        merge_dict(merged, load_config_file(config_path))
        tree = ConfigTree(merged)
    for option in overrides:
        path, value = parse_set_option(option)
        tree.add_keyword(path, value)
    if seed is not None:
        seed = _number('--seed', seed, 0, U64_MAX, integer=True)
        tree.add_keyword('eval.seed', seed)
        tree.add_keyword('synth.seed', seed)
    config = validate(tree.as_dict())
    LOGGER.debug('effective configuration built from protocol %s', protocol)
    return config
