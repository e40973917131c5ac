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

"""class and methods for logs handling."""

import logging
from common.config import CLOUD_LOGGING_ENABLED, LOG_LEVEL

_LEVEL = getattr(logging, LOG_LEVEL, logging.INFO)

if CLOUD_LOGGING_ENABLED:
  # pylint: disable=import-outside-toplevel
  import google.cloud.logging
  client = google.cloud.logging.Client()
  client.setup_logging(log_level=_LEVEL)

logging.basicConfig(
  format="%(asctime)s:%(levelname)s:%(message)s", level=_LEVEL)


class Logger():
  """class def handling logs."""

  @staticmethod
  def debug(message):
    """Display debug logs."""
    logging.debug(message)

  @staticmethod
  def info(message):
    """Display info logs."""
    logging.info(message)

  @staticmethod
  def warning(message):
    """Display warning logs."""
    logging.warning(message)

  @staticmethod
  def error(message):
    """Display error logs."""
    logging.error(message)
