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
Batch commands behind `sumrule-lab verify|asymptotics|appendix`.

Every command resolves its operators from the config, runs one case per
operator through run_cases and writes a CSV table plus a JSON summary.
Return values are process exit codes: 0 when every case passes, 1 otherwise.
"""
# pylint: disable=unused-argument
import json
import os
from typing import Callable, Dict, List, Tuple
import numpy as np
from common.utils.batch_runner import run_cases
from common.utils.errors import ResourceNotFoundException, ValidationError
from common.utils.logging_handler import Logger
from sumrule_lab.config import (APPENDIX_SPREAD, BAND_TOL,
                                FIRST_ORDER_RATIO_RANGE, GRID_STABILITY_RATIO,
                                HS_TOL, MONOTONE_FLOOR, PSD_TOL, RANDOM_SPREAD,
                                SECOND_ORDER_REL_TOL)
from sumrule_lab.schemas.experiment_schema import ExperimentConfig
from sumrule_lab.schemas.report_schema import (AppendixCheckRow,
                                               ConvergenceSummary,
                                               SumRuleReport)
from sumrule_lab.services.asymptotics import build_grid, convergence_experiment
from sumrule_lab.services.cheb_core import ChebUExpansion, parse_A
from sumrule_lab.services.jacobi_ops import (JacobiOperator, Side, from_json,
                                             random_operator)
from sumrule_lab.services.lns_appendix import (
  PerturbationDirection, T_of_J, band_closed_forms, dT_finite_difference,
  dT_linearization, hankel_toeplitz_psd, H_chebyshev, hs_identity_check,
  l2_condition_report, quadratic_form, r2_condition_report, random_direction)
from sumrule_lab.services.sumrules import H_whole_line, verify_sum_rule
from sumrule_lab.utils.errors import ConfigError
from sumrule_lab.utils.report_writer import write_csv, write_json

Case = Tuple[str, JacobiOperator]

# fixed rank-3 operator with a single eigenvalue above the cut
RANK3_PRESET = {"side": "half", "p": {"2": 1.05}, "q": {"0": 1.5, "2": 0.05}}
DEFAULT_Q0 = 1.5

VERIFY_COLUMNS = ("case_id", "a_spec", "rank", "lambda_value", "h_value",
                  "residual", "passed")
CONVERGENCE_COLUMNS = ("n", "z_re", "z_im", "err_abs")
APPENDIX_COLUMNS = ("case_id", "check_name", "value", "threshold", "passed")

# ranges of the appendix sweeps
POSITIVITY_MAX_N = 4
HS_MAX_L = 4
LINEARIZATION_EPS = (1e-3, 1e-4)
LINEARIZATION_NOISE = 1e-12


def case_rng(seed: int, index: int) -> np.random.Generator:
  """Per-case generator; results do not depend on the worker count."""
  return np.random.default_rng([seed, index])


def load_operator(spec) -> JacobiOperator:
  """Inline dict, JSON text or path to a JSON file."""
  if isinstance(spec, dict):
    return from_json(spec)
  text = str(spec).strip()
  if text.startswith("{"):
    return from_json(text)
  if not os.path.isfile(text):
    raise ResourceNotFoundException(f"Operator file {text} not found")
  with open(text, encoding="utf-8") as file:
    return from_json(file.read())


def resolve_cases(config: ExperimentConfig) -> List[Case]:
  """(case_id, operator) pairs described by the config."""
  side = Side(config.side)
  if config.operator is not None:
    return [("operator", load_operator(config.operator))]
  preset = config.preset
  if preset is None:
    preset = "q0" if config.q0 is not None else None
  if preset is None and config.random > 0:
    preset = "random"
  if preset is None:
    raise ConfigError("no operator given: pass --operator, --preset, --q0 "
                      "or --random")
  if preset == "free":
    return [("free", JacobiOperator.free(side))]
  if preset == "q0":
    q0 = DEFAULT_Q0 if config.q0 is None else config.q0
    return [(f"q0={q0:g}", JacobiOperator(side=side, q={0: q0}))]
  if preset == "rank3":
    return [("rank3", from_json(RANK3_PRESET))]
  count = config.random or 1
  spread = RANDOM_SPREAD if side == Side.HALF else APPENDIX_SPREAD
  return [(f"random-{i:04d}",
           random_operator(case_rng(config.seed, i), config.rank, side,
                           spread, spread)) for i in range(count)]


def _output_path(config: ExperimentConfig, suffix: str) -> str:
  return os.path.join(config.output_dir, f"{config.name}{suffix}")


def _verify_case(case: Case, a: ChebUExpansion, a_spec: str,
                 nodes: int) -> SumRuleReport:
  case_id, operator = case
  return verify_sum_rule(operator, a, nodes, a_spec=a_spec, case_id=case_id)


def cmd_verify(config: ExperimentConfig) -> int:
  """H_A against Lambda_A for every operator of the config."""
  cases = resolve_cases(config)
  if any(not operator.is_half_line for _, operator in cases):
    raise ConfigError("verify needs half-line operators")
  a = parse_A(config.a_spec)
  reports = run_cases(_verify_case, cases, jobs=config.jobs, a=a,
                      a_spec=config.a_spec, nodes=config.nodes)
  write_csv(_output_path(config, ".csv"), reports, VERIFY_COLUMNS)
  failed = [r.case_id for r in reports if not r.passed]
  write_json(_output_path(config, ".json"), {
    "config": config,
    "reports": reports,
    "failed": failed,
  })
  Logger.info(f"verify: {len(reports) - len(failed)}/{len(reports)} cases "
              "passed")
  return 1 if failed else 0


def _stability_ratio(coarse: ConvergenceSummary, fine: ConvergenceSummary,
                     burn_in: int) -> float:
  """Largest relative change of the sup errors under grid refinement."""
  ratio = 0.0
  for key, value in coarse.sup_errors.items():
    if int(key) < burn_in:
      continue
    scale = max(value, MONOTONE_FLOOR)
    ratio = max(ratio, abs(fine.sup_errors[key] - value) / scale)
  return ratio


def cmd_asymptotics(config: ExperimentConfig) -> int:
  """Normalized P_n against D(z) over an evaluation grid, n_min..n_max."""
  if config.random > 0 or config.preset == "random":
    raise ValidationError("asymptotics runs on a single operator, "
                          "not on a --random ensemble")
  config = config.copy(update={"preset": config.preset or (
    None if config.operator is not None or config.q0 is not None
    else "rank3")})
  cases = resolve_cases(config)
  if len(cases) != 1:
    raise ConfigError("asymptotics runs on a single operator")
  case_id, operator = cases[0]
  if not operator.is_half_line:
    raise ConfigError("asymptotics needs a half-line operator")
  a = parse_A(config.a_spec)
  n_values = list(range(config.n_min, config.n_max + 1, config.n_step))
  if n_values[-1] != config.n_max:
    n_values.append(config.n_max)

  def grid(points: int):
    return build_grid(config.grid, points, radius=config.grid_radius,
                      distance=config.grid_distance)

  rows, summary = convergence_experiment(
    operator, a, n_values, grid(config.grid_points), nodes=config.nodes,
    jobs=config.jobs, burn_in=config.burn_in, threshold=config.threshold,
    a_spec=config.a_spec, case_id=case_id)
  _, fine = convergence_experiment(
    operator, a, [n for n in n_values if n >= config.burn_in] or n_values,
    grid(2 * config.grid_points), nodes=config.nodes, jobs=config.jobs,
    burn_in=config.burn_in, a_spec=config.a_spec, case_id=case_id)
  ratio = _stability_ratio(summary, fine, config.burn_in)
  summary = summary.copy(update={
    "grid_stability_ratio": ratio,
    "passed": summary.passed and ratio <= GRID_STABILITY_RATIO,
  })
  write_csv(_output_path(config, ".csv"), rows, CONVERGENCE_COLUMNS)
  write_json(_output_path(config, ".json"), {
    "config": config,
    "summary": summary,
  })
  return 0 if summary.passed else 1


def _row(case_id: str, check: str, value: float, threshold: float,
         passed: bool) -> AppendixCheckRow:
  return AppendixCheckRow(case_id=case_id, check_name=check,
                          value=float(value), threshold=float(threshold),
                          passed=bool(passed))


def _check_bands(case_id: str, operator: JacobiOperator,
                 config: ExperimentConfig, rng) -> List[AppendixCheckRow]:
  rows = []
  for l in range(2, max(config.l, 2) + 1):
    bands = T_of_J(operator, l)
    closed = band_closed_forms(operator, l)
    error = max(float(np.max(np.abs(bands.band(k) - values)))
                for k, values in closed.items())
    rows.append(_row(case_id, f"bands:l={l}", error, BAND_TOL,
                     error <= BAND_TOL))
  return rows


def _check_psd(case_id, operator, config, rng) -> List[AppendixCheckRow]:
  _, smallest = hankel_toeplitz_psd(operator, config.K)
  return [_row(case_id, "psd", smallest, -PSD_TOL, smallest >= -PSD_TOL)]


def _check_positivity(case_id, operator, config,
                      rng) -> List[AppendixCheckRow]:
  rows = []
  for n in range(1, POSITIVITY_MAX_N + 1):
    value = H_chebyshev(operator, n, n)
    rows.append(_row(case_id, f"positivity:n={n}", value, -PSD_TOL,
                     value >= -PSD_TOL))
  return rows


def _check_hs(case_id, operator, config, rng) -> List[AppendixCheckRow]:
  rows = []
  for l in range(1, HS_MAX_L + 1):
    check = hs_identity_check(operator, l)
    rows.append(_row(case_id, f"hs:l={l}", check.residual, HS_TOL,
                     check.residual <= HS_TOL))
  return rows


def _check_l2(case_id, operator, config, rng) -> List[AppendixCheckRow]:
  report = l2_condition_report(operator, config.l)
  return [
    _row(case_id, f"l2:{name}", value, 0.0, np.isfinite(value) and value >= 0)
    for name, value in report._asdict().items()
  ]


def _direction(operator: JacobiOperator, rng) -> PerturbationDirection:
  first, last = operator.rank_window
  return random_direction(rng, last - first + 1)


def _check_linearization(case_id, operator, config,
                         rng) -> List[AppendixCheckRow]:
  direction = _direction(operator, rng)
  l = max(config.l, 2)
  formula = dT_linearization(direction, l)
  errors = [
    float(np.linalg.norm(dT_finite_difference(direction, l, eps) - formula))
    for eps in LINEARIZATION_EPS
  ]
  if errors[1] <= LINEARIZATION_NOISE:
    ratio = 1.0 if errors[0] <= LINEARIZATION_NOISE else np.inf
  else:
    scale = LINEARIZATION_EPS[0] / LINEARIZATION_EPS[1]
    ratio = errors[0] / (scale * errors[1])
  lo, hi = FIRST_ORDER_RATIO_RANGE
  return [_row(case_id, f"linearization:l={l}", ratio, hi, lo <= ratio <= hi)]


def _check_quadform(case_id, operator, config,
                    rng) -> List[AppendixCheckRow]:
  direction = _direction(operator, rng)
  a = parse_A(config.a_spec)
  form = quadratic_form(a, direction)
  h_value = H_whole_line(direction.perturb(config.eps), a)
  error = abs(h_value / config.eps**2 - form) / max(form, 1e-300)
  return [_row(case_id, "quadform", error, SECOND_ORDER_REL_TOL,
               error <= SECOND_ORDER_REL_TOL)]


def _check_r2(case_id, operator, config, rng) -> List[AppendixCheckRow]:
  direction = _direction(operator, rng)
  l = config.l
  report = r2_condition_report(direction, l)
  square = parse_A(f"Usq:{l}")
  error = abs(2.0 * quadratic_form(square, direction) -
              (report.dq_norm + report.dp_norm))
  tol = 1e-10 * (1.0 + report.dq_norm + report.dp_norm)
  return [_row(case_id, f"r2:l={l}", error, tol, error <= tol)]


CHECK_RUNNERS: Dict[str, Callable[..., List[AppendixCheckRow]]] = {
  "bands": _check_bands,
  "psd": _check_psd,
  "positivity": _check_positivity,
  "hs": _check_hs,
  "l2": _check_l2,
  "linearization": _check_linearization,
  "quadform": _check_quadform,
  "r2": _check_r2,
}


def _appendix_case(case: Tuple[int, Case],
                   config: ExperimentConfig) -> List[AppendixCheckRow]:
  index, (case_id, operator) = case
  # directions use a stream of their own, so they do not shift the operators
  rng = case_rng(config.seed + 1, index)
  return CHECK_RUNNERS[config.check](case_id, operator, config, rng)


def cmd_appendix(config: ExperimentConfig) -> int:
  """Runs one appendix check over an ensemble of whole-line operators."""
  if config.operator is None and config.preset is None and \
      config.q0 is None:
    config = config.copy(update={"preset": "random",
                                 "random": config.random or 50})
  config = config.copy(update={"side": Side.WHOLE.value})
  cases = resolve_cases(config)
  if any(operator.is_half_line for _, operator in cases):
    raise ConfigError("appendix checks need whole-line operators")
  per_case = run_cases(_appendix_case, list(enumerate(cases)),
                       jobs=config.jobs, config=config)
  rows = [row for case_rows in per_case for row in case_rows]
  write_csv(_output_path(config, ".csv"), rows, APPENDIX_COLUMNS)
  failed = [f"{r.case_id}:{r.check_name}" for r in rows if not r.passed]
  write_json(_output_path(config, ".json"), {
    "config": config,
    "rows": len(rows),
    "failed": failed,
  })
  Logger.info(f"appendix {config.check}: {len(rows) - len(failed)}/"
              f"{len(rows)} checks passed")
  return 1 if failed else 0


COMMANDS = {
  "verify": cmd_verify,
  "asymptotics": cmd_asymptotics,
  "appendix": cmd_appendix,
}


def run_command(config: ExperimentConfig) -> int:
  settings = json.dumps(config.dict(exclude={"operator"}), sort_keys=True)
  Logger.info(f"Running {config.command} with {settings}")
  return COMMANDS[config.command](config)
