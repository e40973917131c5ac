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

"""Entry point for sumrule-lab: sumrule-lab verify|asymptotics|appendix"""
import json
import os
import sys
from typing import List
import pydantic
from absl import app, flags
from common.utils.errors import (PreconditionFailedError,
                                 ResourceNotFoundException, ValidationError)
from common.utils.logging_handler import Logger
from sumrule_lab.schemas.experiment_schema import ExperimentConfig
from sumrule_lab.services.experiments import run_command
from sumrule_lab.utils.errors import (BranchCutError, ConfigError,
                                      NumericalFailureError, PoleError,
                                      TruncationOrderError)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG_ERROR = 2

CONFIG_ERRORS = (ConfigError, ValidationError, ResourceNotFoundException,
                 pydantic.ValidationError)
NUMERICAL_ERRORS = (NumericalFailureError, TruncationOrderError,
                    PreconditionFailedError, BranchCutError, PoleError)

FLAGS = flags.FLAGS
flags.DEFINE_string("config", None, "JSON file with run parameters; "
                    "flags given on the command line override it")
flags.DEFINE_string("operator", None,
                    "Operator as inline JSON or a path to a JSON file")
flags.DEFINE_enum("preset", None, ["free", "q0", "rank3", "random"],
                  "Named operator or ensemble")
flags.DEFINE_enum("side", None, ["half", "whole"], "Operator side")
flags.DEFINE_float("q0", None, "Rank one perturbation q_0")
flags.DEFINE_string("A", None, "Weight A: one, U2sq, U3sq, U1pU2sq, "
                    "UmUn:m,n, Usq:n or U coefficients c1,c2,...")
flags.DEFINE_integer("nodes", None, "Quadrature nodes")
flags.DEFINE_integer("random", None, "Size of the random ensemble")
flags.DEFINE_integer("rank", None, "Rank of random operators")
flags.DEFINE_integer("seed", None, "Seed of the random ensemble")
flags.DEFINE_integer("jobs", None, "Parallel workers (default SUMRULE_JOBS)")
flags.DEFINE_integer("n_min", None, "Smallest polynomial index")
flags.DEFINE_integer("n_max", None, "Largest polynomial index")
flags.DEFINE_integer("n_step", None, "Polynomial index step")
flags.DEFINE_integer("burn_in", None, "First n of the monotone trend check")
flags.DEFINE_enum("grid", None, ["circle", "stadium", "box"],
                  "Evaluation grid kind")
flags.DEFINE_integer("grid_points", None, "Evaluation grid size")
flags.DEFINE_float("grid_distance", None, "Distance of the stadium grid")
flags.DEFINE_float("grid_radius", None, "Radius of the circle grid")
flags.DEFINE_float("threshold", None, "Largest allowed sup error at n_max")
flags.DEFINE_enum("check", None, ["bands", "psd", "positivity", "hs", "l2",
                                  "linearization", "quadform", "r2"],
                  "Appendix check")
flags.DEFINE_integer("l", None, "Chebyshev degree of appendix checks")
flags.DEFINE_integer("K", None, "Size of the Hankel minus Toeplitz matrix")
flags.DEFINE_float("eps", None, "Perturbation size of the quadform check")
flags.DEFINE_string("output_dir", None, "Report directory")
flags.DEFINE_string("report_name", None, "Report file stem")

# flag name -> ExperimentConfig field
OVERRIDES = {
  "operator": "operator",
  "preset": "preset",
  "side": "side",
  "q0": "q0",
  "A": "a_spec",
  "nodes": "nodes",
  "random": "random",
  "rank": "rank",
  "seed": "seed",
  "jobs": "jobs",
  "n_min": "n_min",
  "n_max": "n_max",
  "n_step": "n_step",
  "burn_in": "burn_in",
  "grid": "grid",
  "grid_points": "grid_points",
  "grid_distance": "grid_distance",
  "grid_radius": "grid_radius",
  "threshold": "threshold",
  "check": "check",
  "l": "l",
  "K": "K",
  "eps": "eps",
  "output_dir": "output_dir",
  "report_name": "report_name",
}


def load_config_file(path: str) -> dict:
  if not os.path.isfile(path):
    raise ResourceNotFoundException(f"Config file {path} not found")
  with open(path, encoding="utf-8") as file:
    try:
      data = json.load(file)
    except json.JSONDecodeError as e:
      raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
  if not isinstance(data, dict):
    raise ConfigError(f"Config file {path} must hold a JSON object")
  return data


def build_config(args: List[str],
                 flag_values: flags.FlagValues = FLAGS) -> ExperimentConfig:
  """Config file first, then every flag given on the command line."""
  if len(args) != 1:
    raise ConfigError("expected exactly one command: verify, asymptotics "
                      f"or appendix, got {args}")
  data = {}
  if flag_values.config:
    # flag spellings are accepted as keys of the config file
    for key, value in load_config_file(flag_values.config).items():
      data[OVERRIDES.get(key, key)] = value
  data["command"] = args[0]
  for name, key in OVERRIDES.items():
    if flag_values[name].present:
      data[key] = flag_values[name].value
  return ExperimentConfig(**data)


def parse_flags(argv: List[str]) -> List[str]:
  """absl flag parsing with exit code 2 on bad flags."""
  try:
    return FLAGS(argv)
  except flags.Error as e:
    sys.stderr.write(f"sumrule-lab: {e}\n")
    sys.exit(EXIT_CONFIG_ERROR)


def main(argv) -> int:
  """Entry point method for experiment runs"""
  try:
    config = build_config(list(argv[1:]))
    return run_command(config)
  except CONFIG_ERRORS as e:
    Logger.error(f"Configuration error: {e}")
    return EXIT_CONFIG_ERROR
  except NUMERICAL_ERRORS as e:
    Logger.error(f"Run failed. Error: {e}")
    return EXIT_FAIL


def run():
  app.run(main, flags_parser=parse_flags)


if __name__ == "__main__":
  Logger.info("sumrule-lab was triggered")
  run()
