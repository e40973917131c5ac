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
Pydantic Model for experiment configuration
"""
# pylint: disable=no-self-argument
from typing import Optional, Union
from pydantic import BaseModel, validator
from sumrule_lab.config import DEFAULT_JOBS, OUTPUT_DIR, QUADRATURE_NODES
from sumrule_lab.schemas.schema_examples import ASYMPTOTICS_CONFIG_EXAMPLE

COMMANDS = ("verify", "asymptotics", "appendix")
PRESETS = ("free", "q0", "rank3", "random")
GRID_KINDS = ("circle", "stadium", "box")
APPENDIX_CHECKS = ("bands", "psd", "positivity", "hs", "l2", "linearization",
                   "quadform", "r2")


class ExperimentConfig(BaseModel):
  """Parameters of one sumrule-lab run.

  operator is an inline operator JSON object, a JSON string or a path to a
  JSON file; when it is absent the preset decides the operators.
  """
  command: str
  preset: Optional[str] = None
  operator: Optional[Union[dict, str]] = None
  side: str = "half"
  q0: Optional[float] = None
  a_spec: str = "one"
  nodes: int = QUADRATURE_NODES
  random: int = 0
  rank: int = 3
  seed: int = 0
  jobs: int = DEFAULT_JOBS
  # asymptotics
  n_min: int = 10
  n_max: int = 200
  n_step: int = 10
  burn_in: int = 50
  grid: str = "stadium"
  grid_points: int = 48
  grid_distance: float = 1.0
  grid_radius: float = 4.0
  threshold: Optional[float] = None
  # appendix
  check: str = "bands"
  l: int = 4
  K: int = 8
  eps: float = 1e-3
  output_dir: str = OUTPUT_DIR
  report_name: Optional[str] = None

  @validator("command")
  def check_command(cls, v):
    if v not in COMMANDS:
      raise ValueError(f"command must be one of {', '.join(COMMANDS)}")
    return v

  @validator("preset")
  def check_preset(cls, v):
    if v is not None and v not in PRESETS:
      raise ValueError(f"preset must be one of {', '.join(PRESETS)}")
    return v

  @validator("side")
  def check_side(cls, v):
    if v not in ("half", "whole"):
      raise ValueError("side must be 'half' or 'whole'")
    return v

  @validator("grid")
  def check_grid(cls, v):
    if v not in GRID_KINDS:
      raise ValueError(f"grid must be one of {', '.join(GRID_KINDS)}")
    return v

  @validator("check")
  def check_appendix_check(cls, v):
    if v not in APPENDIX_CHECKS:
      raise ValueError(f"check must be one of {', '.join(APPENDIX_CHECKS)}")
    return v

  @validator("nodes", "jobs", "rank", "grid_points", "l", "K", "n_min",
             "n_step")
  def check_positive(cls, v, field):
    if v < 1:
      raise ValueError(f"{field.name} must be positive")
    return v

  @validator("random", "burn_in")
  def check_non_negative(cls, v, field):
    if v < 0:
      raise ValueError(f"{field.name} must be non-negative")
    return v

  @validator("n_max")
  def check_n_range(cls, v, values):
    if "n_min" in values and v < values["n_min"]:
      raise ValueError("n_max must not be below n_min")
    return v

  @validator("eps", "grid_distance", "grid_radius")
  def check_positive_float(cls, v, field):
    if not v > 0.0:
      raise ValueError(f"{field.name} must be positive")
    return v

  @property
  def name(self) -> str:
    return self.report_name or f"{self.command}-{self.preset or 'custom'}"

  class Config():
    orm_mode = True
    extra = "forbid"
    schema_extra = {
        "example": ASYMPTOTICS_CONFIG_EXAMPLE
    }
