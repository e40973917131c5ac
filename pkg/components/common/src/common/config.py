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
Config module to setup common environment
"""

import os

CLOUD_LOGGING_ENABLED = bool(
  os.getenv("CLOUD_LOGGING_ENABLED", "false").lower() in ("true",))

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# upper bound on worker threads for batch case execution
MAX_WORKERS = int(os.getenv("MAX_WORKERS", "32"))
