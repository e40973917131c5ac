# Copyright 2023 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
  sumrule-lab config file
"""
import os

# env overridable defaults
DEFAULT_JOBS = int(os.getenv("SUMRULE_JOBS", "1"))
QUADRATURE_NODES = int(os.getenv("SUMRULE_QUADRATURE_NODES", "2000"))
OUTPUT_DIR = os.getenv("SUMRULE_OUTPUT_DIR", "./sumrule_reports")

# sum rule verification: PASS iff |H - Lambda| <= tol * (1 + |Lambda|)
SUM_RULE_REL_TOL = 1e-6

# Killip-Simon display carries an extra additive constant
KILLIP_SIMON_CONSTANT = -0.5

# root finding
ROOT_XTOL = 1e-13
ROOT_RESIDUAL_TOL = 1e-10
SIMPLE_ROOT_MIN_DERIVATIVE = 1e-8
EIGEN_SCAN_POINTS = 400
EIGEN_SCAN_MAX_REFINEMENTS = 8

# A >= 0 is checked on this many points of [-2, 2]
NONNEGATIVE_GRID_POINTS = 10000
NONNEGATIVE_TOL = 1e-12

# |u(x)| below this on the cut is treated as a log singularity
CUT_ZERO_TOL = 1e-6

# |u(+-2)| below this fraction of max |u| on the cut marks a resonance at the
# band edge; the a.c. part is then integrated adaptively
NEAR_EDGE_RATIO = 0.05
EDGE_BREAKPOINT_DECADES = 8

# Laurent order used for determinant series
DELTA_SERIES_ORDER = 24

# asymptotics
GRID_CUT_MARGIN = 0.1
SUPPORT_MARGIN = 1e-6
MONOTONE_JITTER = 0.05
MONOTONE_FLOOR = 1e-10
GRID_STABILITY_RATIO = 0.10

# appendix ensembles
APPENDIX_SPREAD = 0.3
APPENDIX_MAX_K = 12
PSD_TOL = 1e-10
BAND_TOL = 1e-12
HS_TOL = 1e-9
FIRST_ORDER_RATIO_RANGE = (0.5, 2.0)
SECOND_ORDER_REL_TOL = 0.05

# random half-line ensembles
RANDOM_SPREAD = 0.4
