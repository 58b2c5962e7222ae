# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""DR-LSSV utils"""

from .config import merge_dict
from .config import build_config
from .config import ConfigTree
from .config import PipelineConfig
from .ingestion import AqiBand
from .ingestion import AqiBreakpoints
from .ingestion import compute_aqi
from .ingestion import read_station_csv
from .ingestion import impute_missing
from .ingestion import build_station_grid
from .hartley import dht_forward, dht_inverse, denoise
from .feature_selection import fit_logistic, select_features
from .lssv import train_lssv, predict, classify_aqi, kendall_tau, tau_band
from .evaluation import evaluate, sweep_report
from .parser import parse_model_file
from .parser import parse_selection_csv
from .parser import parse_report_csv
