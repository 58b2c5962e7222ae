# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c), The DR-LSSV authors.                                         #
# SPDX-License-Identifier: MIT                                                #
# For further information on the license, see the LICENSE.txt file.           #
###############################################################################
"""DR-LSSV: air quality forecasting with Hartley denoising, logistic feature selection and a least-squares SVM"""

__version__ = "0.1.0"

# EOF
