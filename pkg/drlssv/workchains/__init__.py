# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""DR-LSSV stage chains"""

from .base import StageChain
from .pipeline import DrLssvPipeline, SynthChain
