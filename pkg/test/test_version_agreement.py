# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""Check versions"""

import os
import json

import drlssv

SETUP_JSON = os.path.join(os.path.dirname(os.path.dirname(os.path.realpath(__file__))), 'setup.json')


def test_version_agreement():
    """Check if versions in setup.json and in the package are consistent"""
    version1 = drlssv.__version__
    with open(SETUP_JSON) as fhandle:
        version2 = json.load(fhandle)['version']

    assert version1 == version2, 'Versions in drlssv/__init__.py and setup.json are inconsistent: {} vs {}'.format(
        version1, version2)
