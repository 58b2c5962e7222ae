# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Test the configuration tree, protocols and validation"""

import pytest

from drlssv.common import InputValidationError
from drlssv.utils.config import (ConfigTree, PipelineConfig, build_config, load_protocol, load_yaml, merge_dict,
                                 parse_set_option, validate)
from drlssv.utils.ingestion import AqiBand


def test_render_empty():
    tree = ConfigTree()
    assert tree.render().startswith(tree.DISCLAIMER)
    assert load_yaml(tree.render()) == {}


def test_add_keyword():
    """Test add_keyword()"""
    tree = ConfigTree({'lssv': {'gamma': 10.0}})
    tree.add_keyword('lssv.kernel', 'rbf')
    assert tree.as_dict() == {'lssv': {'gamma': 10.0, 'kernel': 'rbf'}}

    tree.add_keyword(['eval', 'seed'], 3)
    assert tree['eval'] == {'seed': 3}

    tree.add_keyword('eval.seed', 4, override=False)
    assert tree['eval'] == {'seed': 3}

    tree.add_keyword('eval.seed.low', 1, override=False)
    assert tree['eval'] == {'seed': 3}

    tree.add_keyword('eval.seed.low', 1)
    assert tree['eval'] == {'seed': {'low': 1}}

    tree.add_keyword('lssv', 'gone', override=False)
    assert tree['lssv'] == {'gamma': 10.0, 'kernel': 'rbf'}

    with pytest.raises(InputValidationError):
        tree.add_keyword('lssv..gamma', 1.0)


def test_tree_copies_its_input():
    params = {'hartley': {'keep_fraction': 0.9}}
    tree = ConfigTree(params)
    tree.add_keyword('hartley.keep_fraction', 0.5)
    assert params == {'hartley': {'keep_fraction': 0.9}}
    assert tree['hartley']['keep_fraction'] == 0.5


def test_render_roundtrip():
    params = {'eval': {'sizes': [250, 500], 'methods': ['drlssv', 'ridge']}, 'lssv': {'sigma': 'median'}}
    rendered = ConfigTree(params).render()
    assert rendered.splitlines()[0] == ConfigTree.DISCLAIMER
    assert load_yaml(rendered) == params


def test_merge_dict():
    base = {'a': {'b': 1, 'c': {'d': 2}}, 'e': 3}
    merge_dict(base, {'a': {'c': {'d': 5, 'f': 6}}, 'g': 7})
    assert base == {'a': {'b': 1, 'c': {'d': 5, 'f': 6}}, 'e': 3, 'g': 7}
    merge_dict(base, {'a': 'flat'})
    assert base['a'] == 'flat'


@pytest.mark.parametrize('option,expected', [
    ('hartley.keep_fraction=0.9', ('hartley.keep_fraction', 0.9)),
    ('eval.sizes=[100, 200]', ('eval.sizes', [100, 200])),
    ('lssv.kernel=linear', ('lssv.kernel', 'linear')),
    ('paths.model = out/m.drlssv', ('paths.model', 'out/m.drlssv')),
    ('paths.daily=', ('paths.daily', None)),
])
def test_parse_set_option(option, expected):
    assert parse_set_option(option) == expected


@pytest.mark.parametrize('option', ['hartley.keep_fraction', 'keep_fraction=0.9', 'eval.sizes=[1, 2'])
def test_parse_set_option_errors(option):
    with pytest.raises(InputValidationError):
        parse_set_option(option)


def test_bundled_protocols_validate():
    default = validate(load_protocol('default'))
    assert default.hartley.keep_fraction == 0.95
    assert default.hartley.export_spectra is False
    assert default.selection.k == 3
    assert default.eval.positive_set == frozenset((AqiBand.POOR, AqiBand.VERY_POOR, AqiBand.SEVERE))
    quick = validate(load_protocol('quick'))
    assert quick.synth.n_stations == 3
    assert quick.eval.sizes == (250, 500)
    assert 'majority' in quick.eval.methods


def test_unknown_protocol():
    with pytest.raises(InputValidationError) as excinfo:
        load_protocol('nonexistent')
    assert 'quick' in str(excinfo.value)


def test_empty_tree_gives_defaults():
    assert validate({}) == PipelineConfig()


@pytest.mark.parametrize('tree', [
    {'hartley': {'keep_fraction': 1.5}},
    {'hartley': {'keep_fraction': 0.0}},
    {'hartley': {'spread': 0.5}},
    {'hartley': {'export_spectra': 'yes'}},
    {'network': {'port': 1}},
    {'selection': {'k': 8}},
    {'selection': {'k': 2.5}},
    {'lssv': {'kernel': 'poly'}},
    {'lssv': {'gamma': 0}},
    {'lssv': {'sigma': 'mean'}},
    {'eval': {'positive_set': []}},
    {'eval': {'positive_set': ['Good', 'Satisfactory', 'Moderate', 'Poor', 'VeryPoor', 'Severe']}},
    {'eval': {'positive_set': ['Hazardous']}},
    {'eval': {'sizes': [500, 250]}},
    {'eval': {'methods': ['drlssv', 'drlssv']}},
    {'eval': {'train_fraction': 1.0}},
    {'ingestion': {'cadence': 'weekly'}},
    {'synth': {'planted': ['PM10', 'Pb']}},
    {'paths': {'output_dir': None}},
    {'selection': True},
])
def test_validate_rejects(tree):
    with pytest.raises(InputValidationError):
        validate(tree)


def test_validate_error_names_the_key():
    with pytest.raises(InputValidationError) as excinfo:
        validate({'hartley': {'keep_fraction': 1.5}})
    assert 'hartley.keep_fraction' in str(excinfo.value)


def test_build_config_layers(tmp_path):
    config_file = tmp_path / 'drlssv.yaml'
    config_file.write_text('hartley:\n  keep_fraction: 0.8\nlssv:\n  gamma: 5.0\n')
    config = build_config('quick', str(config_file), overrides=['lssv.gamma=2.5'])
    assert config.hartley.keep_fraction == 0.8
    assert config.lssv.gamma == 2.5
    assert config.lssv.cap_n == 800


def test_build_config_seed_reaches_split_and_generator(quick_config):
    config = quick_config(seed=7)
    assert config.eval.seed == 7
    assert config.synth.seed == 7
    with pytest.raises(InputValidationError):
        quick_config(seed=-1)


def test_build_config_bad_file(tmp_path):
    with pytest.raises(InputValidationError):
        build_config('quick', str(tmp_path / 'missing.yaml'))
    broken = tmp_path / 'broken.yaml'
    broken.write_text('lssv: [gamma\n')
    with pytest.raises(InputValidationError):
        build_config('quick', str(broken))


def test_model_file_default(quick_config):
    assert quick_config('paths.output_dir=out').paths.model_file.replace('\\', '/') == 'out/model.drlssv'
    assert quick_config('paths.model=elsewhere.drlssv').paths.model_file == 'elsewhere.drlssv'


def test_render_effective_config(quick_config):
    rendered = quick_config('lssv.gamma=3.0').render()
    tree = load_yaml(rendered)
    assert tree['lssv']['gamma'] == 3.0
    assert tree['eval']['positive_set'] == ['Poor', 'VeryPoor', 'Severe']
    assert validate(tree) == quick_config('lssv.gamma=3.0')
