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
Both sides of the sum rule for finite-rank Jacobi operators.

Spectral side:
  Lambda_A = sum_k F(x_k) + (1/2pi) int A(x) sqrt(4-x^2)
             log(sqrt(4-x^2) / (2 pi sigma'(x))) dx
Coefficient side:
  H_A = sum_j (-a log p_{j+1} + <(Phi(J) - Phi(J_0)) e_j, e_j>)
      = -a t_0 + tr(Phi(J) - Phi(J_0)).
"""
import math
from typing import List, Optional
import numpy as np
from scipy import integrate
from common.utils.errors import ValidationError
from common.utils.logging_handler import Logger
from sumrule_lab.config import (CUT_ZERO_TOL, KILLIP_SIMON_CONSTANT,
                                QUADRATURE_NODES, SUM_RULE_REL_TOL)
from sumrule_lab.schemas.report_schema import SumRuleReport
from sumrule_lab.services.cheb_core import (ChebUExpansion, is_nonnegative,
                                            phi_from_A, phi_t_coeffs,
                                            semicircle_quadrature)
from sumrule_lab.services.jacobi_ops import (JacobiOperator,
                                             diag_entry_of_poly, trace_tk)
from sumrule_lab.services.lns_appendix import chebyshev_traces
from sumrule_lab.services.orthopoly import (SpectralData, spectral_data,
                                            u_boundary)

# two coefficient routes must agree to this relative accuracy
ROUTE_AGREEMENT_TOL = 1e-10


def F_of(a: ChebUExpansion, x: float) -> float:
  """F(x) = int_2^x A sqrt(y^2-4) dy (x > 2), int_x^-2 of the same (x < -2).

  Integrated in s with y = +-2 cosh(s), where the integrand is
  A(+-2 cosh s) 4 sinh(s)^2.
  """
  if abs(x) <= 2.0:
    raise ValidationError(f"F is defined for |x| > 2, got {x}")
  sign = math.copysign(1.0, x)
  upper = math.acosh(abs(x) / 2.0)
  value, _ = integrate.quad(
    lambda s: float(a(sign * 2.0 * math.cosh(s))) * 4.0 * math.sinh(s)**2,
    0.0, upper, epsabs=1e-14, epsrel=1e-12, limit=200)
  return value


class LambdaDensity():
  """Three branch density of the measure d lambda for A and sigma."""

  def __init__(self, sd: SpectralData, a: ChebUExpansion):
    self.sd = sd
    self.a = a

  def __call__(self, x: float) -> float:
    if abs(x) < 2.0:
      root = math.sqrt(4.0 - x * x)
      log_ratio = 2.0 * math.log(abs(u_boundary(self.sd.source, x, self.sd.n)))
      return float(self.a(x)) * root * log_ratio / (2.0 * math.pi)
    if abs(x) == 2.0:
      return 0.0
    if x > 2.0:
      count = sum(1 for y in self.sd.eigs_plus if y >= x)
    else:
      count = sum(1 for y in self.sd.eigs_minus if y <= x)
    return float(self.a(x)) * math.sqrt(x * x - 4.0) * count


def lambda_density(sd: SpectralData, a: ChebUExpansion) -> LambdaDensity:
  return LambdaDensity(sd, a)


def _log_integral_adaptive(sd: SpectralData, a: ChebUExpansion,
                           singular_x: np.ndarray) -> float:
  """(1/pi) int log|u| A sqrt(4-x^2) dx in theta, split at near zeros of u."""
  points = sorted({float(np.arccos(np.clip(x / 2.0, -1.0, 1.0)))
                   for x in singular_x})

  def integrand(theta):
    x = 2.0 * math.cos(theta)
    modulus = abs(u_boundary(sd.source, x, sd.n))
    if modulus == 0.0:
      return 0.0
    return math.log(modulus) * float(a(x)) * 4.0 * math.sin(theta)**2

  inner = [p for p in points if 0.0 < p < math.pi]
  value, _ = integrate.quad(integrand, 0.0, math.pi, points=inner or None,
                            limit=400, epsabs=1e-13, epsrel=1e-12)
  return value / math.pi


def log_integral_term(sd: SpectralData, a: ChebUExpansion,
                      nodes: int = QUADRATURE_NODES) -> float:
  """(1/2pi) int log(sqrt(4-x^2)/(2 pi sigma')) A sqrt(4-x^2) dx.

  For finite rank the log equals 2 log|u(x + i0)|, which is what is
  integrated with the Gauss rule for the weight sqrt(4 - x^2).
  """
  x, w = semicircle_quadrature(nodes)
  modulus = np.abs(u_boundary(sd.source, x, sd.n))
  if np.min(modulus) < CUT_ZERO_TOL:
    singular = x[modulus < CUT_ZERO_TOL]
    Logger.info(f"u nearly vanishes on the cut near {singular[:3]}; "
                "switching to adaptive quadrature")
    return _log_integral_adaptive(sd, a, singular)
  return float(np.sum(w * np.log(modulus) * a(x)) / math.pi)


def eigen_term(sd: SpectralData, a: ChebUExpansion) -> float:
  return float(sum(F_of(a, x) for x in sd.eigenvalues))


def _check_weight(a: ChebUExpansion):
  if a.is_zero():
    raise ValidationError("A must not be the zero expansion")
  if not is_nonnegative(a):
    raise ValidationError(f"A = {a.label()} is negative somewhere on [-2, 2]",
                          data=a.to_map())


def Lambda_A(sd: SpectralData, a: ChebUExpansion,
             nodes: int = QUADRATURE_NODES) -> float:
  """Spectral side of the sum rule."""
  _check_weight(a)
  return eigen_term(sd, a) + log_integral_term(sd, a, nodes)


def h_A_at(J: JacobiOperator, a: ChebUExpansion, k: int) -> float:
  """h_A o tau^k = -a log p_{m+k+2} + <(Phi(J)-Phi(J_0)) e_{m+k+1}, e_{m+k+1}>."""
  if not J.is_half_line:
    raise ValidationError("h_A is defined for half-line operators")
  if k < 0:
    raise ValidationError(f"shift must be non-negative, got {k}")
  phi, a_const = phi_from_A(a)
  m = a.degree
  return -a_const * math.log(J.p_at(m + k + 2)) + \
    diag_entry_of_poly(J, phi, m + k + 1)


def _coefficient_terms(J: JacobiOperator, a: ChebUExpansion,
                       count: int) -> List[float]:
  phi, a_const = phi_from_A(a)
  return [
    -a_const * math.log(J.p_at(j + 1)) + diag_entry_of_poly(J, phi, j)
    for j in range(count)
  ]


def _terminating_length(J: JacobiOperator, a: ChebUExpansion) -> int:
  # terms vanish once the Phi window (reach deg Phi) clears the rank window
  return J.rank + a.degree + 4


def H_A_partial_sums(J: JacobiOperator, a: ChebUExpansion,
                     count: int) -> List[float]:
  """Cumulative sums of the first count terms of the H_A series."""
  if not J.is_half_line:
    raise ValidationError("the H_A series is defined for half-line operators")
  return list(np.cumsum(_coefficient_terms(J, a, count)))


def H_A(J: JacobiOperator, a: ChebUExpansion,
        N: Optional[int] = None) -> float:  # pylint: disable=invalid-name
  """Coefficient side as a series.

  The first m + 1 terms are followed by h_A o tau^k for k = 0, 1, ...;
  N caps the number of h terms, None sums the terminating series of a
  finite-rank operator.
  """
  m = a.degree
  if N is None:
    count = max(_terminating_length(J, a), m + 1)
  else:
    if N < 0:
      raise ValidationError(f"partial sum cap must be non-negative, got {N}")
    count = m + 1 + N
  return float(H_A_partial_sums(J, a, count)[-1])


def H_via_trace(J: JacobiOperator, a: ChebUExpansion) -> float:
  """-a t_0 + sum_k a_k t_k with Phi = sum_k a_k z^k."""
  if not J.is_half_line:
    raise ValidationError("use H_whole_line for whole-line operators")
  phi, a_const = phi_from_A(a)
  value = -a_const * trace_tk(J, 0)
  for k, coeff in enumerate(phi.coeffs):
    if k >= 1 and coeff != 0.0:
      value += coeff * trace_tk(J, k)
  return float(value)


def H_whole_line(J: JacobiOperator, a: ChebUExpansion) -> float:
  """tr(Phi(J) - Phi(J_0)) - a sum log p_i for a whole-line operator.

  With Phi = sum_k phi_k T_k, tr(T_k(J) - T_k(J_0)) = k a_k(J).
  """
  if J.is_half_line:
    raise ValidationError("H_whole_line needs a whole-line operator")
  a_const = 2.0 * a.coeff(1)
  phi_t = phi_t_coeffs(a)
  traces = chebyshev_traces(J, max(phi_t))
  value = -a_const * traces[0] / 2.0
  for k, coeff in phi_t.items():
    if k >= 1:
      value += coeff * k * traces[k]
  return float(value)


def killip_simon_H(J: JacobiOperator) -> float:
  """sum_k (p_k^2 - 1 - log p_k^2) + (1/2) sum_k q_k^2, without a constant."""
  p_part = sum(v * v - 1.0 - math.log(v * v) for v in J.p.values())
  q_part = 0.5 * sum(v * v for v in J.q.values())
  return float(p_part + q_part)


def killip_simon_constant_discrepancy(report: SumRuleReport) -> float:
  """|H + c - Lambda| for the additive constant c of the Killip-Simon display."""
  return abs(report.h_value + KILLIP_SIMON_CONSTANT - report.lambda_value)


def _is_one(a: ChebUExpansion) -> bool:
  return a.coeffs == (1.0,)


def verify_sum_rule(J: JacobiOperator, a: ChebUExpansion,
                    nodes: int = QUADRATURE_NODES,
                    a_spec: str = "", case_id: str = "",
                    sd: Optional[SpectralData] = None) -> SumRuleReport:
  """Computes H_A and Lambda_A and compares them."""
  _check_weight(a)
  if sd is None:
    sd = spectral_data(J)
  eigen = eigen_term(sd, a)
  log_term = log_integral_term(sd, a, nodes)
  lambda_value = eigen + log_term
  h_value = H_A(J, a)
  h_trace_value = H_via_trace(J, a)
  residual = abs(h_value - lambda_value)
  threshold = SUM_RULE_REL_TOL * (1.0 + abs(lambda_value))
  routes_agree = abs(h_value - h_trace_value) <= \
    ROUTE_AGREEMENT_TOL * (1.0 + abs(h_value))
  if not routes_agree:
    Logger.warning(f"{case_id}: H_A routes disagree "
                   f"({h_value!r} vs {h_trace_value!r})")
  report = SumRuleReport(
    case_id=case_id,
    a_spec=a_spec or a.label(),
    a_coeffs={str(l): c for l, c in a.items()},
    rank=J.rank,
    lambda_value=lambda_value,
    h_value=h_value,
    h_trace_value=h_trace_value,
    eigen_term=eigen,
    log_integral_term=log_term,
    residual=residual,
    quadrature_nodes=nodes,
    eigenvalues=list(sd.eigenvalues),
    tolerance=threshold,
    passed=bool(residual <= threshold and routes_agree))
  if _is_one(a):
    report.ks_constant_residual = killip_simon_constant_discrepancy(report)
  if not report.passed:
    Logger.warning(f"{case_id}: sum rule residual {residual:.3g} "
                   f"exceeds {threshold:.3g}")
  return report
