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

""" Schema examples and test objects for unit tests """
# pylint: disable = line-too-long

OPERATOR_EXAMPLE = {
  "side": "half",
  "p": {"2": 1.05},
  "q": {"0": 1.5, "2": 0.05}
}

VERIFY_CONFIG_EXAMPLE = {
  "command": "verify",
  "operator": OPERATOR_EXAMPLE,
  "a_spec": "U2sq",
  "nodes": 2000,
  "jobs": 1,
  "seed": 7
}

ASYMPTOTICS_CONFIG_EXAMPLE = {
  "command": "asymptotics",
  "preset": "rank3",
  "a_spec": "U2sq",
  "n_min": 10,
  "n_max": 200,
  "n_step": 10,
  "grid": "stadium",
  "grid_points": 48,
  "grid_distance": 1.0,
  "burn_in": 50,
  "threshold": 0.001
}

APPENDIX_CONFIG_EXAMPLE = {
  "command": "appendix",
  "check": "psd",
  "K": 8,
  "random": 50,
  "seed": 7
}

SUM_RULE_REPORT_EXAMPLE = {
  "case_id": "q0",
  "a_spec": "one",
  "a_coeffs": {"1": 1.0},
  "rank": 1,
  "lambda_value": 1.1250000000000002,
  "h_value": 1.125,
  "h_trace_value": 1.125,
  "eigen_term": 0.091847627140883,
  "log_integral_term": 1.0331523728591172,
  "residual": 2.2e-16,
  "quadrature_nodes": 2000,
  "eigenvalues": [2.1666666666666665],
  "tolerance": 1e-06,
  "passed": True,
  "ks_constant_residual": 0.5
}

CONVERGENCE_ROW_EXAMPLE = {
  "n": 50,
  "z_re": 0.0,
  "z_im": 3.0,
  "err_abs": 1.2e-08
}

CONVERGENCE_SUMMARY_EXAMPLE = {
  "case_id": "rank3",
  "a_spec": "U2sq",
  "sup_errors": {"50": 1e-06, "100": 2e-11},
  "monotone": True,
  "violations": 0,
  "final_sup_error": 2e-11,
  "threshold": 0.001,
  "grid_stability_ratio": 0.01,
  "passed": True
}

APPENDIX_ROW_EXAMPLE = {
  "case_id": "random-0003",
  "check_name": "psd",
  "value": 0.0123,
  "threshold": -1e-10,
  "passed": True
}
