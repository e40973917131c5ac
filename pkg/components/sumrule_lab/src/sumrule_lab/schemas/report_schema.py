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
Pydantic models for experiment reports
"""
from typing import Dict, List, Optional
from pydantic import BaseModel
from sumrule_lab.schemas.schema_examples import (SUM_RULE_REPORT_EXAMPLE,
                                                 CONVERGENCE_ROW_EXAMPLE,
                                                 CONVERGENCE_SUMMARY_EXAMPLE,
                                                 APPENDIX_ROW_EXAMPLE)


class SumRuleReport(BaseModel):
  """Both sides of the sum rule for one operator and weight A"""
  case_id: str = ""
  a_spec: str
  a_coeffs: Dict[str, float]
  rank: int
  lambda_value: float
  h_value: float
  h_trace_value: float
  eigen_term: float
  log_integral_term: float
  residual: float
  quadrature_nodes: int
  eigenvalues: List[float] = []
  tolerance: float
  passed: bool
  # only set in the Killip-Simon case A = 1
  ks_constant_residual: Optional[float] = None

  class Config():
    orm_mode = True
    schema_extra = {
        "example": SUM_RULE_REPORT_EXAMPLE
    }


class ConvergenceRow(BaseModel):
  """Normalized polynomial error at one grid point"""
  n: int
  z_re: float
  z_im: float
  err_abs: float

  class Config():
    orm_mode = True
    schema_extra = {
        "example": CONVERGENCE_ROW_EXAMPLE
    }


class ConvergenceSummary(BaseModel):
  """Sup errors per n and monotone trend statistics"""
  case_id: str = ""
  a_spec: str
  sup_errors: Dict[str, float]
  monotone: bool
  violations: int
  final_sup_error: float
  threshold: Optional[float] = None
  grid_stability_ratio: Optional[float] = None
  passed: bool

  class Config():
    orm_mode = True
    schema_extra = {
        "example": CONVERGENCE_SUMMARY_EXAMPLE
    }


class AppendixCheckRow(BaseModel):
  """One appendix check on one operator"""
  case_id: str
  check_name: str
  value: float
  threshold: float
  passed: bool

  class Config():
    orm_mode = True
    schema_extra = {
        "example": APPENDIX_ROW_EXAMPLE
    }
