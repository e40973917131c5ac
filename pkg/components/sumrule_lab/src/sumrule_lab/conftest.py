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

""" conftest.py: Consist of fixtures"""
# pylint: disable=redefined-outer-name
import numpy as np
import pytest
from sumrule_lab.services.jacobi_ops import (JacobiOperator, from_json,
                                             random_operator)
from sumrule_lab.testing.example_objects import (ENSEMBLE_SEED,
                                                 ENSEMBLE_SIZE,
                                                 TEST_P_PERTURBATION,
                                                 TEST_RANK_ONE_OPERATOR,
                                                 TEST_RANK_THREE_OPERATOR,
                                                 TEST_WHOLE_LINE_OPERATOR)


@pytest.fixture
def free_operator():
  return JacobiOperator.free()


@pytest.fixture
def q0_operator():
  return from_json(TEST_RANK_ONE_OPERATOR)


@pytest.fixture
def rank3_operator():
  return from_json(TEST_RANK_THREE_OPERATOR)


@pytest.fixture
def whole_line_operator():
  return from_json(TEST_WHOLE_LINE_OPERATOR)


@pytest.fixture
def p_perturbation():
  return from_json(TEST_P_PERTURBATION)


@pytest.fixture
def half_line_ensemble():
  return [
    random_operator(np.random.default_rng([ENSEMBLE_SEED, i]), 1 + i % 6)
    for i in range(ENSEMBLE_SIZE)
  ]


@pytest.fixture
def whole_line_ensemble():
  return [
    random_operator(np.random.default_rng([ENSEMBLE_SEED, i]), 1 + i % 3,
                    side="whole", spread_p=0.3, spread_q=0.3)
    for i in range(ENSEMBLE_SIZE)
  ]
