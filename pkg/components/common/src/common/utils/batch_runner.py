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

"""Order preserving parallel execution of independent batch cases"""

import functools
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List
from common.config import MAX_WORKERS
from common.utils.errors import ValidationError
from common.utils.logging_handler import Logger


def resolve_jobs(jobs: int) -> int:
  """Clamps a requested worker count to [1, MAX_WORKERS]

  Args:
    jobs: requested number of workers
  Returns:
    usable worker count
  """
  if jobs is None or int(jobs) < 1:
    raise ValidationError(f"jobs must be a positive integer, got {jobs}")
  return min(int(jobs), MAX_WORKERS)


def run_cases(fn: Callable[..., Any], cases: Iterable[Any], jobs: int = 1,
              **kwargs) -> List[Any]:
  """Runs fn over every case and returns results in input order.

  Cases share no mutable state, so the result list is identical for any
  number of workers. Exceptions raised by a case propagate to the caller.

  Args:
    fn: callable taking a single case plus keyword arguments
    cases: iterable of case descriptions
    jobs: number of worker threads
  Returns:
    list of fn(case, **kwargs), ordered like cases
  """
  cases = list(cases)
  workers = resolve_jobs(jobs)
  task = functools.partial(fn, **kwargs)
  if workers == 1 or len(cases) <= 1:
    return [task(case) for case in cases]

  Logger.info(f"Running {len(cases)} cases on {workers} workers")
  with ThreadPoolExecutor(max_workers=workers) as executor:
    futures = [executor.submit(task, case) for case in cases]
    return [future.result() for future in futures]
