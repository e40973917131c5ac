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
Normalization polynomials and the limit function D(z) for the asymptotics of
orthonormal polynomials of a finite-rank Jacobi operator.

  log Delta_n   ~ -t_0 - sum_k t_k / (k z^k)
  B_n           = polynomial part of A(z) sqrt(z^2-4) log Delta_n(z)
  log(zeta^{n+1} sqrt(z^2-4) P_n) ~ s_0 + sum_k s_k / z^k,
                  s_0 = -log(p_1...p_n), s_k = -tr(J~(n)^k - J~_0(n)^k) / k
  B~_n          = polynomial part of A(z) sqrt(z^2-4) (s_0 + s_1/z + ...)
  D(z)          = exp(int d lambda(x) / (x - z) / (A(z) sqrt(z^2-4)))
"""
import cmath
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple
import numpy as np
from scipy import integrate
from common.utils.batch_runner import run_cases
from common.utils.errors import ValidationError
from common.utils.logging_handler import Logger
from sumrule_lab.config import (MONOTONE_FLOOR, MONOTONE_JITTER,
                                GRID_CUT_MARGIN, QUADRATURE_NODES,
                                SUPPORT_MARGIN)
from sumrule_lab.schemas.report_schema import (ConvergenceRow,
                                               ConvergenceSummary)
from sumrule_lab.services.cheb_core import (ChebUExpansion, LaurentSeries,
                                            PowerPoly, laurent_from_poly,
                                            laurent_mul, laurent_sqrt_z2m4,
                                            semicircle_quadrature, u_to_power)
from sumrule_lab.services.jacobi_ops import (JacobiOperator, trace_tk,
                                             truncation, truncation_trace)
from sumrule_lab.services.orthopoly import (SpectralData, delta_direct,
                                            scaled_P, spectral_data,
                                            u_boundary, zeta_array)
from sumrule_lab.utils.errors import (BranchCutError, PoleError,
                                      TruncationOrderError)


@dataclass(frozen=True)
class NormalizationPoly:
  """B_n (kind "B", from Delta_n) or B~_n (kind "B_tilde", from P_n)."""
  n: int
  kind: str
  poly: PowerPoly
  residual_order: int
  # coefficient of 1/z left after removing the polynomial part
  remainder_inverse_z: Optional[float] = None

  def __call__(self, z):
    return self.poly(z)


def sqrt_z2m4(z) -> complex:
  """Branch of sqrt(z^2 - 4) analytic off [-2, 2], ~ z at infinity."""
  z = complex(z)
  return cmath.sqrt(z - 2.0) * cmath.sqrt(z + 2.0)


def log_Pn_series(J: JacobiOperator, n: int, K: int) -> LaurentSeries:  # pylint: disable=invalid-name
  """Coefficients s_0..s_K of log(zeta^{n+1} sqrt(z^2-4) P_n(z)) at infinity.

  The truncated-determinant identity drops log(1 - zeta^{2n+2}), so only
  K <= 2n + 1 is exact.
  """
  if n < 1:
    raise ValidationError(f"polynomial index must be positive, got {n}")
  if K < 0 or K > 2 * n + 1:
    raise TruncationOrderError(
      f"order {K} exceeds the exact range 2n+1 = {2 * n + 1} for n = {n}")
  perturbed = truncation(J, n)
  free = truncation(JacobiOperator.free(), n)
  coeffs = [-sum(math.log(v) for v in perturbed.off_diagonal) -
            math.log(J.p_at(n))]
  for k in range(1, K + 1):
    coeffs.append(-truncation_trace((perturbed, free), k) / k)
  return LaurentSeries(0, tuple(coeffs))


def log_delta_series(J: JacobiOperator, K: int) -> LaurentSeries:  # pylint: disable=invalid-name
  """Coefficients of log Delta_n at infinity up to z^-K from traces."""
  coeffs = [-trace_tk(J, 0)]
  coeffs += [-trace_tk(J, k) / k for k in range(1, K + 1)]
  return LaurentSeries(0, tuple(coeffs))


def _weighted_product(a: ChebUExpansion, log_series: LaurentSeries,
                      terms: int) -> LaurentSeries:
  """A(z) sqrt(z^2-4) times a log series, keeping powers m+1 down."""
  a_series = laurent_from_poly(a, terms)
  root = laurent_sqrt_z2m4(terms)
  return laurent_mul(laurent_mul(a_series, root), log_series)


def compute_B_tilde(J: JacobiOperator, n: int,
                    a: ChebUExpansion) -> NormalizationPoly:
  """B~_n of degree m + 1 from the trace expansion of the n x n truncation."""
  m = a.degree
  if m < 0:
    raise ValidationError("A must not be the zero expansion")
  log_series = log_Pn_series(J, n, m + 1)
  product = _weighted_product(a, log_series, m + 2)
  return NormalizationPoly(n=n, kind="B_tilde",
                           poly=product.polynomial_part(),
                           residual_order=m + 2)


def compute_B(J: JacobiOperator, a: ChebUExpansion) -> NormalizationPoly:
  """B_n from log Delta_n; also keeps the 1/z remainder coefficient."""
  m = a.degree
  if m < 0:
    raise ValidationError("A must not be the zero expansion")
  product = _weighted_product(a, log_delta_series(J, m + 2), m + 3)
  return NormalizationPoly(n=J.rank, kind="B",
                           poly=product.polynomial_part(),
                           residual_order=m + 2,
                           remainder_inverse_z=product.coeff(-1))


def _check_grid_point(z, a: ChebUExpansion) -> Tuple[complex, complex]:
  z = complex(z)
  if z.imag == 0.0 and -2.0 <= z.real <= 2.0:
    raise BranchCutError(f"z = {z} lies on the cut")
  weight = complex(a(z)) * sqrt_z2m4(z)
  if abs(weight) < 1e-14:
    raise PoleError(f"A(z) sqrt(z^2-4) vanishes at z = {z}")
  return z, weight


def normalized_Pn(J: JacobiOperator, n: int, a: ChebUExpansion, z,
                  b_tilde: Optional[NormalizationPoly] = None) -> complex:
  """zeta^{n+1} sqrt(z^2-4) P_n(z) exp(-B~_n(z) / (A(z) sqrt(z^2-4)))."""
  z, weight = _check_grid_point(z, a)
  if b_tilde is None:
    b_tilde = compute_B_tilde(J, n, a)
  zeta_value = complex(zeta_array(z))
  value = zeta_value * complex(scaled_P(J, n, z)) * sqrt_z2m4(z)
  return value * cmath.exp(-complex(b_tilde(z)) / weight)


def normalized_delta(J: JacobiOperator, n: Optional[int], a: ChebUExpansion,
                     z, b: Optional[NormalizationPoly] = None) -> complex:
  """Delta_n(z) exp(-B_n(z) / (A(z) sqrt(z^2-4))); n defaults to the rank."""
  z, weight = _check_grid_point(z, a)
  if b is None:
    b = compute_B(J, a)
  return complex(delta_direct(J, z, n)) * cmath.exp(-complex(b(z)) / weight)


def ratio_asymptotics(J: JacobiOperator, n: int, z) -> complex:
  """P_{n-1}(z) / (p_n P_n(z)) - zeta(z)."""
  if n < 1:
    raise ValidationError(f"polynomial index must be positive, got {n}")
  zeta_value = complex(zeta_array(z))
  ratio = zeta_value * complex(scaled_P(J, n - 1, z)) / \
    (J.p_at(n) * complex(scaled_P(J, n, z)))
  return ratio - zeta_value


def _distance_to_interval(z: complex, lo: float, hi: float) -> float:
  x = min(max(z.real, lo), hi)
  return abs(z - x)


def lambda_support(sd: SpectralData) -> List[Tuple[float, float]]:
  """Intervals carrying d lambda: the cut and the eigenvalue tails."""
  intervals = [(-2.0, 2.0)]
  if sd.eigs_plus:
    intervals.append((2.0, max(sd.eigs_plus)))
  if sd.eigs_minus:
    intervals.append((min(sd.eigs_minus), -2.0))
  return intervals


class DFunction():
  """D(z) for one operator and weight, with the inside quadrature cached."""

  def __init__(self, sd: SpectralData, a: ChebUExpansion,
               nodes: int = QUADRATURE_NODES):
    self.sd = sd
    self.a = a
    x, w = semicircle_quadrature(nodes)
    log_modulus = np.log(np.abs(u_boundary(sd.source, x, sd.n)))
    self._x = x
    self._inside_weights = w * a(x) * log_modulus / math.pi

  def cauchy_integral(self, z: complex) -> complex:
    """int d lambda(x) / (x - z)."""
    inside = complex(np.sum(self._inside_weights / (self._x - z)))
    outside = 0.0j
    for eigs, sign in ((self.sd.eigs_plus, 1.0), (self.sd.eigs_minus, -1.0)):
      for x_k in eigs:
        outside += self._tail_integral(z, x_k, sign)
    return inside + outside

  def _tail_integral(self, z: complex, x_k: float, sign: float) -> complex:
    upper = math.acosh(abs(x_k) / 2.0)

    def part(s, take):
      x = sign * 2.0 * math.cosh(s)
      value = float(self.a(x)) * 4.0 * math.sinh(s)**2 / (x - z)
      return take(value)

    real, _ = integrate.quad(part, 0.0, upper, args=(lambda v: v.real,),
                             epsabs=1e-14, epsrel=1e-12, limit=200)
    imag, _ = integrate.quad(part, 0.0, upper, args=(lambda v: v.imag,),
                             epsabs=1e-14, epsrel=1e-12, limit=200)
    return complex(real, imag)

  def __call__(self, z) -> complex:
    z, weight = _check_grid_point(z, self.a)
    for lo, hi in lambda_support(self.sd):
      if _distance_to_interval(z, lo, hi) < SUPPORT_MARGIN:
        raise PoleError(f"z = {z} is too close to the support of lambda")
    return cmath.exp(self.cauchy_integral(z) / weight)


def D_of(sd: SpectralData, a: ChebUExpansion, z,
         nodes: int = QUADRATURE_NODES) -> complex:
  return DFunction(sd, a, nodes)(z)


def real_zeros(a: ChebUExpansion) -> List[float]:
  power = u_to_power(a).coeffs
  if len(power) < 2:
    return []
  roots = np.polynomial.polynomial.polyroots(power)
  return sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9)


def build_grid(kind: str, points: int, radius: float = 4.0,
               distance: float = 1.0, max_modulus: float = 6.0) -> np.ndarray:
  """Evaluation points.

  circle:  points on |z| = radius
  stadium: points on {dist(z, [-2, 2]) = distance}
  box:     a points x points lattice over the square of half-side
           max_modulus, kept where dist(z, [-2, 2]) >= distance and
           |z| <= max_modulus
  """
  if points < 1:
    raise ValidationError(f"grid needs at least one point, got {points}")
  if kind == "circle":
    angles = 2.0 * np.pi * (np.arange(points) + 0.5) / points
    return radius * np.exp(1j * angles)
  if kind == "stadium":
    straight = 4.0
    arc = np.pi * distance
    total = 2.0 * (straight + arc)
    s = total * (np.arange(points) + 0.5) / points
    out = []
    for value in s:
      if value < straight:
        out.append(complex(-2.0 + value, distance))
      elif value < straight + arc:
        phi = np.pi / 2.0 - (value - straight) / distance
        out.append(2.0 + distance * cmath.exp(1j * phi))
      elif value < 2.0 * straight + arc:
        out.append(complex(2.0 - (value - straight - arc), -distance))
      else:
        phi = -np.pi / 2.0 - (value - 2.0 * straight - arc) / distance
        out.append(-2.0 + distance * cmath.exp(1j * phi))
    return np.array(out)
  if kind == "box":
    axis = np.linspace(-max_modulus, max_modulus, points)
    grid = (axis[:, None] + 1j * axis[None, :]).ravel()
    keep = [z for z in grid if abs(z) <= max_modulus and
            _distance_to_interval(complex(z), -2.0, 2.0) >= distance]
    return np.array(keep)
  raise ValidationError(f"Unknown grid kind '{kind}'")


def validate_grid(grid: Sequence[complex], a: ChebUExpansion,
                  sd: Optional[SpectralData] = None,
                  margin: float = GRID_CUT_MARGIN):
  """Rejects grid points near the cut, the lambda support or real zeros of A."""
  if len(grid) == 0:
    raise ValidationError("evaluation grid is empty")
  intervals = lambda_support(sd) if sd is not None else [(-2.0, 2.0)]
  zeros = real_zeros(a)
  for z in grid:
    z = complex(z)
    for lo, hi in intervals:
      if _distance_to_interval(z, lo, hi) < margin:
        raise ValidationError(
          f"grid point {z} is within {margin} of [{lo:.6g}, {hi:.6g}]")
    for root in zeros:
      if abs(z - root) < margin:
        raise ValidationError(
          f"grid point {z} is within {margin} of a zero of A")


class TrendStats(NamedTuple):
  monotone: bool
  violations: int
  worst_ratio: float


def monotone_trend(errors: Sequence[float], jitter: float = MONOTONE_JITTER,
                   floor: float = MONOTONE_FLOOR) -> TrendStats:
  """Non-increasing check allowing relative jitter above an absolute floor."""
  violations = 0
  worst = 0.0
  for before, after in zip(errors[:-1], errors[1:]):
    if after > before * (1.0 + jitter) + floor:
      violations += 1
    if before > 0.0:
      worst = max(worst, after / before)
  return TrendStats(monotone=violations == 0, violations=violations,
                    worst_ratio=worst)


def _errors_for_n(n: int, J: JacobiOperator, a: ChebUExpansion,
                  grid: Sequence[complex],
                  targets: Sequence[complex]) -> List[float]:
  b_tilde = compute_B_tilde(J, n, a)
  return [
    abs(normalized_Pn(J, n, a, z, b_tilde) - target)
    for z, target in zip(grid, targets)
  ]


def convergence_experiment(J: JacobiOperator, a: ChebUExpansion,
                           n_values: Sequence[int], grid: Sequence[complex],
                           nodes: int = QUADRATURE_NODES, jobs: int = 1,
                           burn_in: int = 50,
                           threshold: Optional[float] = None,
                           a_spec: str = "", case_id: str = ""
                           ) -> Tuple[List[ConvergenceRow],
                                      ConvergenceSummary]:
  """Error of the normalized P_n against D(z) over an evaluation grid, per n."""
  n_values = sorted(set(int(n) for n in n_values))
  if not n_values or n_values[0] < 1:
    raise ValidationError("n values must be positive")
  sd = spectral_data(J)
  validate_grid(grid, a, sd)
  target = DFunction(sd, a, nodes)
  targets = [target(z) for z in grid]
  per_n = run_cases(_errors_for_n, n_values, jobs=jobs, J=J, a=a, grid=grid,
                    targets=targets)

  rows = []
  sup_errors = {}
  for n, errors in zip(n_values, per_n):
    sup_errors[str(n)] = float(max(errors))
    for z, err in zip(grid, errors):
      z = complex(z)
      rows.append(ConvergenceRow(n=n, z_re=z.real, z_im=z.imag, err_abs=err))

  trend_values = [sup_errors[str(n)] for n in n_values if n >= burn_in]
  trend = monotone_trend(trend_values)
  final = sup_errors[str(n_values[-1])]
  passed = trend.monotone and (threshold is None or final <= threshold)
  Logger.info(f"{case_id}: final sup error {final:.3g} at n={n_values[-1]}, "
              f"{trend.violations} trend violations")
  summary = ConvergenceSummary(case_id=case_id, a_spec=a_spec or a.label(),
                               sup_errors=sup_errors,
                               monotone=trend.monotone,
                               violations=trend.violations,
                               final_sup_error=final, threshold=threshold,
                               passed=passed)
  return rows, summary
