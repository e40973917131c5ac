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
Orthonormal polynomials, the Joukowski map, the resolvent and the spectral
data of a finite-rank half-line Jacobi operator.

For J with rank index n (p_k = 1, q_k = 0 for k >= n) everything reduces to
  u(z) = p_n P_n(z) - zeta(z) P_{n-1}(z),   Delta_n(z) = u(z) zeta(z)**n,
and the resolvent r(z) = -(p_n Q_n - zeta Q_{n-1}) / u.
Long recurrences are run on R_k = zeta**k P_k, which stays bounded off the cut.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import numpy as np
from scipy import integrate, linalg, optimize
from common.utils.errors import PreconditionFailedError, ValidationError
from common.utils.logging_handler import Logger
from sumrule_lab.config import (EDGE_BREAKPOINT_DECADES,
                                EIGEN_SCAN_MAX_REFINEMENTS, EIGEN_SCAN_POINTS,
                                NEAR_EDGE_RATIO, ROOT_RESIDUAL_TOL, ROOT_XTOL,
                                SIMPLE_ROOT_MIN_DERIVATIVE)
from sumrule_lab.services.cheb_core import semicircle_quadrature
from sumrule_lab.services.jacobi_ops import (JacobiOperator, gershgorin_bounds,
                                             spectral_radius_bound, trace_tk,
                                             truncation)
from sumrule_lab.utils.errors import (BranchCutError, NumericalFailureError,
                                      PoleError)


def _on_cut(z) -> bool:
  z = complex(z)
  return z.imag == 0.0 and -2.0 <= z.real <= 2.0


def zeta_array(z: np.ndarray) -> np.ndarray:
  z = np.asarray(z, dtype=complex)
  root = np.sqrt(z - 2.0) * np.sqrt(z + 2.0)
  return 2.0 / (z + root)


def zeta(z):
  """Branch of zeta + 1/zeta = z with |zeta| < 1, for z off [-2, 2]."""
  if _on_cut(z):
    raise BranchCutError(f"zeta({z}) needs z off [-2, 2]; "
                         "use zeta_boundary for boundary values")
  if isinstance(z, (int, float, np.integer, np.floating)):
    # x = +-2 cosh(t) avoids cancellation near the band edges
    x = float(z)
    t = math.acosh(abs(x) / 2.0)
    return math.copysign(math.exp(-t), x)
  return complex(zeta_array(np.asarray(z))[()])


def zeta_boundary(x):
  """zeta(x + i0) = exp(-i theta) with x = 2 cos(theta), theta in [0, pi]."""
  x = np.asarray(x, dtype=float)
  if np.any(np.abs(x) > 2.0):
    raise ValidationError("boundary values exist only on [-2, 2]")
  value = np.exp(-1j * np.arccos(x / 2.0))
  return value[()] if value.ndim == 0 else value


def zeta_derivative(zeta_value):
  """d zeta / dz = zeta^2 / (zeta^2 - 1)."""
  return zeta_value**2 / (zeta_value**2 - 1.0)


def _rank_index(J: JacobiOperator, n: Optional[int]) -> int:
  if not J.is_half_line:
    raise ValidationError("orthogonal polynomials need a half-line operator")
  if n is None:
    return J.rank
  if n < J.rank:
    raise PreconditionFailedError(
      f"rank index {n} is below the perturbation rank {J.rank}")
  return n


def eval_PQ(J: JacobiOperator, n: int, z):
  """P_0..P_n and Q_0..Q_n at z (scalar or array).

  Returns:
    tuple of arrays shaped (n + 1,) + shape(z)
  """
  if n < 0:
    raise ValidationError(f"polynomial count must be non-negative, got {n}")
  z = np.asarray(z)
  dtype = np.result_type(z, float)
  P = np.zeros((n + 1,) + z.shape, dtype=dtype)
  Q = np.zeros((n + 1,) + z.shape, dtype=dtype)
  P[0] = 1.0
  if n >= 1:
    P[1] = (z - J.q_at(0)) / J.p_at(1)
    Q[1] = 1.0 / J.p_at(1)
  for k in range(1, n):
    P[k + 1] = ((z - J.q_at(k)) * P[k] - J.p_at(k) * P[k - 1]) / J.p_at(k + 1)
    Q[k + 1] = ((z - J.q_at(k)) * Q[k] - J.p_at(k) * Q[k - 1]) / J.p_at(k + 1)
  return P, Q


def _eval_P_derivative(J: JacobiOperator, n: int, x: float):
  """P_{n-1}, P_n and their derivatives at a real point."""
  p_prev, p_cur = 0.0, 1.0
  d_prev, d_cur = 0.0, 0.0
  for k in range(n):
    p_next = ((x - J.q_at(k)) * p_cur - J.p_at(k) * p_prev) / J.p_at(k + 1)
    d_next = (p_cur + (x - J.q_at(k)) * d_cur - J.p_at(k) * d_prev) / \
      J.p_at(k + 1)
    p_prev, p_cur = p_cur, p_next
    d_prev, d_cur = d_cur, d_next
  return p_prev, p_cur, d_prev, d_cur


def _scaled_recurrence(J: JacobiOperator, n: int, z, zeta_value,
                       second_kind: bool = False):
  """(X_{n-1}, X_n) for X_k = zeta^k P_k, or zeta^k Q_k if second_kind."""
  z = np.asarray(z)
  zeta_value = np.asarray(zeta_value)
  dtype = np.result_type(z, zeta_value, float)
  if second_kind:
    prev = np.zeros(z.shape, dtype=dtype)
    cur = prev + zeta_value / J.p_at(1)
    start = 1
  else:
    prev = np.zeros(z.shape, dtype=dtype)
    cur = prev + 1.0
    start = 0
  if n == 0:
    return (prev, cur) if not second_kind else (prev, prev.copy())
  for k in range(start, n):
    nxt = (zeta_value * (z - J.q_at(k)) * cur -
           J.p_at(k) * zeta_value**2 * prev) / J.p_at(k + 1)
    prev, cur = cur, nxt
  return prev, cur


def scaled_P(J: JacobiOperator, n: int, z):
  """zeta(z)^n P_n(z) without overflow, for z off the cut."""
  zeta_value = zeta_array(z)
  _, value = _scaled_recurrence(J, n, z, zeta_value)
  return value[()] if np.ndim(value) == 0 else value


def _delta_from_zeta(J: JacobiOperator, n: int, z, zeta_value):
  r_prev, r_cur = _scaled_recurrence(J, n, z, zeta_value)
  return J.p_at(n) * r_cur - zeta_value**2 * r_prev


def delta_direct(J: JacobiOperator, z, n: Optional[int] = None):
  """Delta_n(z) = (p_n P_n - zeta P_{n-1}) zeta^n for z off [-2, 2]."""
  if np.ndim(z) == 0 and _on_cut(z):
    raise BranchCutError(f"Delta_n is evaluated off [-2, 2], got {z}")
  n = _rank_index(J, n)
  value = _delta_from_zeta(J, n, z, zeta_array(z))
  return value[()] if np.ndim(value) == 0 else value


def u_value(J: JacobiOperator, z, n: Optional[int] = None):
  """u(z) = p_n P_n(z) - zeta(z) P_{n-1}(z) off the cut."""
  n = _rank_index(J, n)
  zeta_value = zeta_array(z)
  value = _delta_from_zeta(J, n, z, zeta_value) / zeta_value**n
  return value[()] if np.ndim(value) == 0 else value


def u_boundary(J: JacobiOperator, x, n: Optional[int] = None):
  """u(x + i0) on [-2, 2]; |u(x + i0)| = |Delta_n(x + i0)|."""
  n = _rank_index(J, n)
  zeta_value = zeta_boundary(x)
  r_prev, r_cur = _scaled_recurrence(J, n, np.asarray(x, dtype=float),
                                     zeta_value)
  value = (J.p_at(n) * r_cur - zeta_value**2 * r_prev) / zeta_value**n
  return value[()] if np.ndim(value) == 0 else value


def resolvent_rn(J: JacobiOperator, z, n: Optional[int] = None) -> complex:
  """r(z) = <(J - z)^-1 e_0, e_0> = -(p_n Q_n - zeta Q_{n-1}) / u(z)."""
  if _on_cut(z):
    raise BranchCutError(f"resolvent is evaluated off [-2, 2], got {z}")
  n = _rank_index(J, n)
  zeta_value = zeta_array(z)
  r_prev, r_cur = _scaled_recurrence(J, n, z, zeta_value)
  s_prev, s_cur = _scaled_recurrence(J, n, z, zeta_value, second_kind=True)
  denominator = J.p_at(n) * r_cur - zeta_value**2 * r_prev
  numerator = J.p_at(n) * s_cur - zeta_value**2 * s_prev
  if abs(denominator) < 1e-14 * (1.0 + abs(numerator)):
    raise PoleError(f"z = {z} is an eigenvalue of J")
  return complex(-numerator / denominator)


def ac_density(J: JacobiOperator, x, n: Optional[int] = None):
  """sigma'_ac(x) = (1/pi) (sqrt(4 - x^2) / 2) / |u(x + i0)|^2."""
  x = np.asarray(x, dtype=float)
  modulus = np.abs(u_boundary(J, x, n))**2
  value = np.sqrt(np.clip(4.0 - x**2, 0.0, None)) / (2.0 * np.pi * modulus)
  return value[()] if value.ndim == 0 else value


def _delta_outside(J: JacobiOperator, n: int, t, sign: float):
  """Delta_n at x = sign * 2 cosh(t), with zeta = sign * exp(-t)."""
  t = np.asarray(t, dtype=float)
  x = sign * 2.0 * np.cosh(t)
  return _delta_from_zeta(J, n, x, sign * np.exp(-t))


def _scan_side(J: JacobiOperator, n: int, t_max: float, sign: float,
               points: int) -> List[float]:
  grid = np.linspace(0.0, t_max, points + 1)
  values = _delta_outside(J, n, grid, sign)
  roots = []
  for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
    if fa == 0.0:
      roots.append(a)
    elif fa * fb < 0.0:
      roots.append(optimize.brentq(
        lambda t: float(_delta_outside(J, n, t, sign)), a, b,
        xtol=ROOT_XTOL))
  if values[-1] == 0.0:
    roots.append(grid[-1])
  return [float(sign * 2.0 * math.cosh(t)) for t in roots if t > 0.0]


def eigenvalues_outside(J: JacobiOperator,
                        n: Optional[int] = None) -> Tuple[List[float],
                                                          List[float]]:
  """Zeros of u on R minus [-2, 2].

  The scan runs in t with x = +-2 cosh(t), so that resolution concentrates
  near the band edges, and doubles until the root count is stable across
  two refinements.

  Returns:
    (eigs_minus, eigs_plus), both sorted ascending
  """
  n = _rank_index(J, n)
  lo, hi = gershgorin_bounds(J)
  sides = []
  if hi > 2.0:
    sides.append((1.0, math.acosh(hi / 2.0) * 1.01 + 1e-3))
  if lo < -2.0:
    sides.append((-1.0, math.acosh(-lo / 2.0) * 1.01 + 1e-3))

  points = EIGEN_SCAN_POINTS
  previous, stable = None, 0
  for _ in range(EIGEN_SCAN_MAX_REFINEMENTS):
    found = []
    for sign, t_max in sides:
      found.extend(_scan_side(J, n, t_max, sign, points))
    if previous is not None and len(found) == len(previous):
      stable += 1
    else:
      stable = 0
    previous = found
    if stable >= 2:
      break
    points *= 2
  else:
    raise NumericalFailureError("eigenvalue count did not stabilize",
                                data={"operator": J.to_dict()})

  for x in previous:
    _, _, _, _, derivative = _u_and_derivative(J, n, x)
    if abs(derivative) < SIMPLE_ROOT_MIN_DERIVATIVE:
      raise NumericalFailureError(
        f"zero of u at {x} is not simple (|u'| = {abs(derivative):.3g})")
    residual = abs(u_value(J, x, n))
    if residual > ROOT_RESIDUAL_TOL:
      Logger.warning(f"eigenvalue {x} leaves residual |u| = {residual:.3g}")
  minus = sorted(x for x in previous if x < -2.0)
  plus = sorted(x for x in previous if x > 2.0)
  return minus, plus


def _u_and_derivative(J: JacobiOperator, n: int, x: float):
  """zeta, P_{n-1}, P_n, u and u' at a real x outside [-2, 2]."""
  zeta_value = zeta(x)
  p_prev, p_cur, d_prev, d_cur = _eval_P_derivative(J, n, x)
  u = J.p_at(n) * p_cur - zeta_value * p_prev
  derivative = J.p_at(n) * d_cur - zeta_derivative(zeta_value) * p_prev - \
    zeta_value * d_prev
  return zeta_value, p_prev, p_cur, u, derivative


def point_mass_weights(J: JacobiOperator, eigs: List[float],
                       n: Optional[int] = None) -> List[float]:
  """w_k = (p_n Q_n - zeta Q_{n-1}) / u' at each eigenvalue."""
  n = _rank_index(J, n)
  weights = []
  for x in eigs:
    zeta_value, _, _, _, derivative = _u_and_derivative(J, n, x)
    _, Q = eval_PQ(J, n, x)
    numerator = J.p_at(n) * Q[n] - zeta_value * (Q[n - 1] if n >= 1 else 0.0)
    w = float(numerator / derivative)
    if not w > 0.0:
      raise NumericalFailureError(f"non-positive point mass {w} at {x}",
                                  data={"eigenvalue": x, "weight": w})
    weights.append(w)
  return weights


@dataclass(frozen=True)
class SpectralData:
  """Spectral measure of a finite-rank half-line operator."""
  source: JacobiOperator
  n: int
  eigs_minus: Tuple[float, ...] = ()
  eigs_plus: Tuple[float, ...] = ()
  weights_minus: Tuple[float, ...] = ()
  weights_plus: Tuple[float, ...] = ()
  _cache: dict = field(default_factory=dict, compare=False, repr=False)

  @property
  def eigenvalues(self) -> Tuple[float, ...]:
    return self.eigs_minus + self.eigs_plus

  @property
  def weights(self) -> Tuple[float, ...]:
    return self.weights_minus + self.weights_plus

  def ac_density(self, x):
    return ac_density(self.source, x, self.n)

  def ac_profile(self, nodes: int) -> Tuple[np.ndarray, np.ndarray,
                                            np.ndarray]:
    """Quadrature nodes x, weights W and g(x) = sigma'(x) / sqrt(4 - x^2)."""
    if nodes not in self._cache:
      x, w = semicircle_quadrature(nodes)
      g = 1.0 / (2.0 * np.pi * np.abs(u_boundary(self.source, x, self.n))**2)
      self._cache[nodes] = (x, w, g)
    return self._cache[nodes]

  def edge_resonance(self, nodes: int) -> bool:
    """True when |u| at a band edge is small against its size on the cut.

    The a.c. density then peaks in a region narrower than the Gauss node
    spacing next to that edge.
    """
    key = ("edge", nodes)
    if key not in self._cache:
      x, _, _ = self.ac_profile(nodes)
      scale = float(np.max(np.abs(u_boundary(self.source, x, self.n))))
      edges = np.abs(u_boundary(self.source, np.array([-2.0, 2.0]), self.n))
      self._cache[key] = bool(np.min(edges) < NEAR_EDGE_RATIO * scale)
    return self._cache[key]

  def ac_integral(self, f, nodes: int) -> complex:
    """int f(x) sigma'_ac(x) dx over [-2, 2]."""
    if not self.edge_resonance(nodes):
      x, w, g = self.ac_profile(nodes)
      return complex(np.sum(w * g * f(x)))
    return _ac_integral_adaptive(self, f)


def _edge_breakpoints() -> List[float]:
  steps = [10.0**-k for k in range(1, EDGE_BREAKPOINT_DECADES + 1)]
  return sorted(steps + [math.pi - s for s in steps])


def _ac_integral_adaptive(sd: SpectralData, f) -> complex:
  """Adaptive quadrature in theta, x = 2 cos(theta), refined at both edges.

  sigma'_ac(x) dx = 2 sin(theta)^2 / (pi |u|^2) d theta.
  """

  def density(theta):
    x = 2.0 * math.cos(theta)
    modulus = abs(u_boundary(sd.source, x, sd.n))
    return complex(f(x)) * 2.0 * math.sin(theta)**2 / (math.pi * modulus**2)

  parts = []
  for take in (lambda v: v.real, lambda v: v.imag):
    value, _ = integrate.quad(lambda t, take=take: take(density(t)), 0.0,
                              math.pi, points=_edge_breakpoints(), limit=800,
                              epsabs=1e-14, epsrel=1e-12)
    parts.append(value)
  return complex(parts[0], parts[1])


def spectral_data(J: JacobiOperator, n: Optional[int] = None) -> SpectralData:
  """Eigenvalues, point masses and a.c. density of J."""
  n = _rank_index(J, n)
  minus, plus = eigenvalues_outside(J, n)
  weights_minus = point_mass_weights(J, minus, n)
  weights_plus = point_mass_weights(J, plus, n)
  if minus or plus:
    Logger.debug(f"operator has eigenvalues {minus + plus}")
  return SpectralData(source=J, n=n, eigs_minus=tuple(minus),
                      eigs_plus=tuple(plus),
                      weights_minus=tuple(weights_minus),
                      weights_plus=tuple(weights_plus))


def moments(sd: SpectralData, k: int, nodes: int = 2000) -> float:
  """int x^k d sigma(x)."""
  point_part = sum(
    wk * xk**k for xk, wk in zip(sd.eigenvalues, sd.weights))
  return float(point_part + sd.ac_integral(lambda x: x**k, nodes).real)


def stieltjes(sd: SpectralData, z, nodes: int = 2000) -> complex:
  """int d sigma(x) / (x - z) assembled from the spectral data."""
  if _on_cut(z):
    raise BranchCutError(f"Stieltjes transform needs z off [-2, 2], got {z}")
  point_part = sum(wk / (xk - z) for xk, wk in zip(sd.eigenvalues, sd.weights))
  return complex(point_part + sd.ac_integral(lambda x: 1.0 / (x - z), nodes))


def delta_truncation_bound(J: JacobiOperator, z, K: int) -> float:  # pylint: disable=invalid-name
  """Size of the first omitted term scale (R/|z|)^(K+1) / (1 - R/|z|)."""
  ratio = spectral_radius_bound(J) / abs(z)
  return ratio**(K + 1) / (1.0 - ratio)


def delta_via_traces(J: JacobiOperator, z, K: int) -> complex:  # pylint: disable=invalid-name
  """exp(-t_0 - sum_{k=1..K} t_k / (k z^k))."""
  if K < 1:
    raise ValidationError(f"series length must be positive, got {K}")
  radius = spectral_radius_bound(J)
  if abs(z) <= radius:
    raise PreconditionFailedError(
      f"|z| = {abs(z):.6g} is inside the spectral bound {radius:.6g}")
  z = complex(z)
  log_delta = -trace_tk(J, 0)
  for k in range(1, K + 1):
    log_delta -= trace_tk(J, k) / (k * z**k)
  Logger.debug(
    f"trace series bound at |z|={abs(z):.4g}: "
    f"{delta_truncation_bound(J, z, K):.3g}")
  return complex(np.exp(log_delta))


def truncation_eigenvalues(J: JacobiOperator, size: int) -> np.ndarray:
  """Eigenvalues of J~(size) outside [-2, 2]."""
  block = truncation(J, size)
  values = linalg.eigh_tridiagonal(np.asarray(block.diagonal),
                                   np.asarray(block.off_diagonal),
                                   eigvals_only=True)
  return np.sort(values[np.abs(values) > 2.0])
