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

"""Classes for handling numerical errors of sumrule-lab"""


class BranchCutError(Exception):
  """Error class to be raised when a point lies on the cut [-2, 2]"""

  def __init__(self, message="Point lies on the cut [-2, 2]"):
    self.message = message
    super().__init__(self.message)


class PoleError(Exception):
  """Error class to be raised at an eigenvalue or too close to the support"""

  def __init__(self, message="Point is a pole or too close to the support"):
    self.message = message
    super().__init__(self.message)


class NumericalFailureError(Exception):
  """Error class to be raised when a numerical routine cannot be trusted"""

  def __init__(self, message="Numerical failure", data=None):
    self.message = message
    self.data = data
    super().__init__(self.message)


class TruncationOrderError(Exception):
  """Error class to be raised when a series order exceeds its valid range"""

  def __init__(self, message="Truncation order out of range"):
    self.message = message
    super().__init__(self.message)


class ConfigError(Exception):
  """Error class to be raised for invalid experiment configuration"""

  def __init__(self, message="Invalid configuration"):
    self.message = message
    super().__init__(self.message)
