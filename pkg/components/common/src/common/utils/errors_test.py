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
  Unit tests for shared error classes
"""
# pylint: disable=unused-argument,redefined-outer-name,unused-import
import pytest
from common.utils.errors import (ValidationError, PreconditionFailedError,
                                 ResourceNotFoundException)


def test_default_messages():
  assert ValidationError().message == "Validation Failed"
  assert PreconditionFailedError().message == "Precondition Failed"
  assert ResourceNotFoundException().message == "Resource not found"


def test_error_payload():
  with pytest.raises(ValidationError) as exc:
    raise ValidationError("bad operator", data={"p": {"1": -1.0}})
  assert exc.value.data == {"p": {"1": -1.0}}
  assert str(exc.value) == "bad operator"
