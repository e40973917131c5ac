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

"""Writers for CSV tables and JSON summaries of experiment runs"""
import csv
import json
import os
from typing import Any, Iterable, Sequence
from pydantic import BaseModel
from common.utils.logging_handler import Logger


def format_value(value: Any) -> str:
  """17 significant digits for floats, PASS/FAIL for booleans."""
  if isinstance(value, bool):
    return "PASS" if value else "FAIL"
  if isinstance(value, float):
    return f"{value:.17g}"
  if value is None:
    return ""
  return str(value)


def _plain(value: Any) -> Any:
  if isinstance(value, BaseModel):
    return {k: _plain(v) for k, v in value.dict().items()}
  if isinstance(value, dict):
    return {str(k): _plain(v) for k, v in value.items()}
  if isinstance(value, (list, tuple)):
    return [_plain(v) for v in value]
  return value


def write_csv(path: str, rows: Iterable[BaseModel],
              columns: Sequence[str]) -> str:
  """Writes the given columns of pydantic rows to path."""
  os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
  with open(path, "w", newline="", encoding="utf-8") as file:
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
      data = row.dict()
      writer.writerow([format_value(data[c]) for c in columns])
  Logger.info(f"Wrote {path}")
  return path


def write_json(path: str, payload: Any) -> str:
  """Writes pydantic models, dicts and lists as sorted JSON."""
  os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
  with open(path, "w", encoding="utf-8") as file:
    json.dump(_plain(payload), file, sort_keys=True, indent=2)
    file.write("\n")
  Logger.info(f"Wrote {path}")
  return path
