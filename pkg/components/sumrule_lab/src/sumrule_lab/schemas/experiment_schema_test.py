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
  Unit tests for the experiment configuration model
"""
# disabling pylint rules that conflict with pytest fixtures
# pylint: disable=unused-argument,redefined-outer-name,unused-import
import pydantic
import pytest
from sumrule_lab.schemas.experiment_schema import ExperimentConfig
from sumrule_lab.schemas.schema_examples import (APPENDIX_CONFIG_EXAMPLE,
                                                 ASYMPTOTICS_CONFIG_EXAMPLE,
                                                 VERIFY_CONFIG_EXAMPLE)


def test_defaults():
  config = ExperimentConfig(command="appendix")
  assert config.side == "half"
  assert config.a_spec == "one"
  assert config.check == "bands"
  assert config.name == "appendix-custom"
  assert ExperimentConfig(command="verify", preset="rank3").name == \
    "verify-rank3"
  assert ExperimentConfig(command="verify", report_name="x").name == "x"


def test_example_is_valid():
  config = ExperimentConfig(**ASYMPTOTICS_CONFIG_EXAMPLE)
  assert config.command == "asymptotics"
  assert config.grid == "stadium"
  assert ExperimentConfig(**VERIFY_CONFIG_EXAMPLE).operator["p"] == {"2": 1.05}
  assert ExperimentConfig(**APPENDIX_CONFIG_EXAMPLE).name == "appendix-custom"


@pytest.mark.parametrize("fields", [
  {"command": "run"},
  {"command": "verify", "preset": "huge"},
  {"command": "verify", "side": "left"},
  {"command": "asymptotics", "grid": "ring"},
  {"command": "appendix", "check": "all"},
  {"command": "verify", "nodes": 0},
  {"command": "verify", "jobs": 0},
  {"command": "verify", "random": -1},
  {"command": "asymptotics", "n_min": 20, "n_max": 10},
  {"command": "appendix", "eps": 0.0},
  {"command": "verify", "Nodes": 5},
  {"command": "verify", "presett": "rank3"},
])
def test_invalid_fields(fields):
  with pytest.raises(pydantic.ValidationError):
    ExperimentConfig(**fields)
