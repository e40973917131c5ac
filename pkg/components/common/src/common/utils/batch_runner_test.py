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
  Unit tests for the batch runner
"""
# disabling pylint rules that conflict with pytest fixtures
# pylint: disable=unused-argument,redefined-outer-name,unused-import
import threading
import pytest
from common.utils.batch_runner import run_cases, resolve_jobs
from common.utils.errors import ValidationError


def _square(case, offset=0):
  return case * case + offset


def test_run_cases_preserves_order():
  cases = list(range(40))
  serial = run_cases(_square, cases, jobs=1)
  parallel = run_cases(_square, cases, jobs=8)
  assert serial == parallel
  assert parallel[7] == 49


def test_run_cases_passes_kwargs():
  assert run_cases(_square, [1, 2], jobs=2, offset=3) == [4, 7]


def test_run_cases_uses_threads():
  seen = set()

  def record(case):
    seen.add(threading.get_ident())
    return case

  assert run_cases(record, range(5), jobs=1) == [0, 1, 2, 3, 4]
  assert len(seen) == 1


def test_run_cases_propagates_errors():

  def fail(case):
    raise ValueError(f"case {case}")

  with pytest.raises(ValueError):
    run_cases(fail, [1, 2, 3], jobs=2)


def test_resolve_jobs():
  assert resolve_jobs(1) == 1
  assert resolve_jobs(10 ** 6) >= 1
  with pytest.raises(ValidationError):
    resolve_jobs(0)
