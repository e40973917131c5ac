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
Whole-line Chebyshev functional calculus and the positivity diagnostics
built on it.

Band convention: T_l(J) = sum_{k=-l..l} Lambda_k S^k with diagonal Lambda_k,
so the matrix entry T_l(J)[i, i-k] equals Lambda_k[i]. Shifted sequences are
X^{(-j)}[i] = X[i-j]. All quantities are local, so a finite window around
the perturbation reproduces them exactly.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Tuple
import numpy as np
from scipy import linalg
from common.utils.errors import ValidationError
from sumrule_lab.config import APPENDIX_MAX_K
from sumrule_lab.services.cheb_core import ChebUExpansion
from sumrule_lab.services.jacobi_ops import (JacobiOperator, Side,
                                             dense_window)


def _require_whole_line(J: JacobiOperator):
  if J.is_half_line:
    raise ValidationError("appendix quantities need a whole-line operator")


def _support(J: JacobiOperator) -> Tuple[int, int]:
  return J.rank_window


def _chebyshev_stack(J: JacobiOperator, l_max: int):
  """T_0..T_{l_max} of J and of J_0 on one window.

  Returns:
    (lo, T, T0): lo is the window's first index, T[l] the dense matrices
  """
  first, last = _support(J)
  margin = 2 * l_max + 2
  lo, hi = first - margin, last + margin
  window = dense_window(J, lo, hi)
  free = dense_window(JacobiOperator.free(Side.WHOLE), lo, hi)
  stacks = []
  for matrix in (window, free):
    size = matrix.shape[0]
    T = [2.0 * np.eye(size), matrix.copy()]
    for _ in range(2, l_max + 1):
      T.append(matrix @ T[-1] - T[-2])
    stacks.append(T[:l_max + 1])
  return lo, stacks[0], stacks[1]


@dataclass(frozen=True)
class BandDecomposition:
  """Diagonals Lambda_k(l), k = -l..l, on rows row_lo..row_hi."""
  l: int
  row_lo: int
  diagonals: Dict[int, np.ndarray] = field(default_factory=dict)

  @property
  def rows(self) -> np.ndarray:
    size = len(next(iter(self.diagonals.values())))
    return np.arange(self.row_lo, self.row_lo + size)

  def band(self, k: int) -> np.ndarray:
    return self.diagonals[k]


def _active_rows(J: JacobiOperator, l: int) -> Tuple[int, int]:
  first, last = _support(J)
  return first - l - 1, last + l + 1


def _bands_from_matrix(matrix: np.ndarray, lo: int, l: int,
                       rows: Tuple[int, int]) -> Dict[int, np.ndarray]:
  row_lo, row_hi = rows
  out = {}
  for k in range(-l, l + 1):
    out[k] = np.array(
      [matrix[i - lo, i - k - lo] for i in range(row_lo, row_hi + 1)])
  return out


def T_of_J(J: JacobiOperator, l: int) -> BandDecomposition:
  """Band diagonals of T_l(J) from T_l = J T_{l-1} - T_{l-2}."""
  _require_whole_line(J)
  if l < 0:
    raise ValidationError(f"Chebyshev degree must be non-negative, got {l}")
  lo, stack, _ = _chebyshev_stack(J, max(l, 1))
  rows = _active_rows(J, l)
  return BandDecomposition(l=l, row_lo=rows[0],
                           diagonals=_bands_from_matrix(stack[l], lo, l, rows))


def band_closed_forms(J: JacobiOperator, l: int) -> Dict[int, np.ndarray]:
  """Lambda_l(l), Lambda_{l-1}(l) and Lambda_{l-2}(l) from the product forms.

  Lambda_l[i]     = p_i p_{i-1} ... p_{i-l+1}
  Lambda_{l-1}[i] = p_i ... p_{i-l+2} (q_i + ... + q_{i-l+1})
  Lambda_{l-2}[i] = p_i ... p_{i-l+3} (sum_{j=-1..l-2} (p_{i-j}^2 - 1)
                    + sum_{0<=a<=b<=l-2} q_{i-a} q_{i-b})
  """
  _require_whole_line(J)
  if l < 2:
    raise ValidationError(f"closed forms need l >= 2, got {l}")
  row_lo, row_hi = _active_rows(J, l)
  top, second, third = [], [], []
  for i in range(row_lo, row_hi + 1):
    # p[j] = p_{i-j}, q[j] = q_{i-j}
    p = {j: J.p_at(i - j) for j in range(-1, l)}
    q = {j: J.q_at(i - j) for j in range(l)}
    top.append(math.prod(p[j] for j in range(l)))
    second.append(
      math.prod(p[j] for j in range(l - 1)) * sum(q[j] for j in range(l)))
    p_sum = sum(p[j]**2 - 1.0 for j in range(-1, l - 1))
    q_sum = sum(q[a] * q[b] for a in range(l - 1) for b in range(a, l - 1))
    third.append(math.prod(p[j] for j in range(l - 2)) * (p_sum + q_sum))
  return {l: np.array(top), l - 1: np.array(second), l - 2: np.array(third)}


def chebyshev_traces(J: JacobiOperator, k_max: int) -> np.ndarray:
  """a_0..a_{k_max}: a_k = tr(T_k(J) - T_k(J_0)) / k, a_0 = sum log p_i^2."""
  _require_whole_line(J)
  if k_max < 0:
    raise ValidationError(f"trace order must be non-negative, got {k_max}")
  values = np.zeros(k_max + 1)
  values[0] = sum(math.log(v * v) for v in J.p.values())
  if k_max == 0 or J.is_free():
    return values
  lo, stack, free_stack = _chebyshev_stack(J, k_max)
  first, last = _support(J)
  for k in range(1, k_max + 1):
    rows = np.arange(first - k - 1, last + k + 2) - lo
    diff = np.diag(stack[k])[rows] - np.diag(free_stack[k])[rows]
    values[k] = float(np.sum(diff)) / k
  return values


def a_k_of(J: JacobiOperator, k: int) -> float:
  return float(chebyshev_traces(J, k)[k])


def hankel_toeplitz_matrix(J: JacobiOperator, K: int) -> np.ndarray:  # pylint: disable=invalid-name
  """M[k, l] = a_{k+l} - a_{|k-l|} for k, l = 1..K."""
  if K < 1 or K > APPENDIX_MAX_K:
    raise ValidationError(f"K must lie in [1, {APPENDIX_MAX_K}], got {K}")
  a = chebyshev_traces(J, 2 * K)
  index = np.arange(1, K + 1)
  return a[index[:, None] + index[None, :]] - \
    a[np.abs(index[:, None] - index[None, :])]


def hankel_toeplitz_psd(J: JacobiOperator,
                        K: int) -> Tuple[np.ndarray, float]:  # pylint: disable=invalid-name
  """The Hankel minus Toeplitz matrix and its smallest eigenvalue."""
  matrix = hankel_toeplitz_matrix(J, K)
  return matrix, float(linalg.eigvalsh(matrix)[0])


def H_chebyshev(J: JacobiOperator, m: int, n: int) -> float:
  """H_{U_m U_n}(J) = a_{m+n} - a_{|m-n|} (a_0 = sum log p_i^2 when m = n)."""
  if m < 1 or n < 1:
    raise ValidationError(f"U indices start at 1, got ({m}, {n})")
  a = chebyshev_traces(J, m + n)
  return float(a[m + n] - a[abs(m - n)])


def hankel_quadratic_H(J: JacobiOperator, b: ChebUExpansion) -> float:
  """c^T M c for B = sum c_l U_l, which equals H_{B^2}(J)."""
  if b.is_zero():
    raise ValidationError("B must not be the zero expansion")
  c = np.array(b.coeffs)
  matrix = hankel_toeplitz_matrix(J, len(c))
  return float(c @ matrix @ c)


class HSCheck(NamedTuple):
  lhs: float
  rhs: float
  residual: float


def hs_identity_check(J: JacobiOperator, l: int) -> HSCheck:
  """Trace route H_{U_l^2} against its row-wise form.

  rhs = (1/l) (sum_i |q~_i|^2 / 2 + sum_i ((t_l)_i^2 - 1 - log (t_l)_i^2))
  with (t_l)_i = p_{i+1} ... p_{i+l} and q~_i the middle 2l-1 entries of
  row i of T_l(J).
  """
  _require_whole_line(J)
  if l < 1:
    raise ValidationError(f"l must be positive, got {l}")
  lhs = H_chebyshev(J, l, l)
  bands = T_of_J(J, l)
  middle = sum(float(np.sum(bands.band(k)**2)) for k in range(-l + 1, l))
  first, last = _support(J)
  t_sum = 0.0
  for i in range(first - l - 1, last + 1):
    t = math.prod(J.p_at(i + j) for j in range(1, l + 1))
    t_sum += t * t - 1.0 - math.log(t * t)
  rhs = (middle / 2.0 + t_sum) / l
  return HSCheck(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs))


class L2Report(NamedTuple):
  window_u: float
  window_q: float
  u_squared: float
  q_squared: float


def l2_condition_report(J: JacobiOperator, n: int) -> L2Report:
  """Squared l2 norms of the window sums of u_j = p_j^2 - 1 and q_j, and of
  {u_j^2} and {q_j^2}."""
  _require_whole_line(J)
  if n < 1:
    raise ValidationError(f"window length must be positive, got {n}")
  if J.is_free():
    return L2Report(0.0, 0.0, 0.0, 0.0)
  first, last = _support(J)
  def u(j):
    return J.p_at(j)**2 - 1.0

  window_u = window_q = 0.0
  for j in range(first - n - 1, last + 1):
    window_u += sum(u(j + k) for k in range(1, n + 1))**2
    window_q += sum(J.q_at(j + k) for k in range(1, n + 1))**2
  u_squared = sum(u(j)**4 for j in J.p)
  q_squared = sum(v**4 for v in J.q.values())
  return L2Report(window_u, window_q, u_squared, q_squared)


@dataclass(frozen=True)
class PerturbationDirection:
  """Direction dJ = (dp, dq) of a whole-line perturbation of J_0."""
  dp: Dict[int, float] = field(default_factory=dict)
  dq: Dict[int, float] = field(default_factory=dict)

  @property
  def dj_vector(self) -> Dict[int, float]:
    """Interleaved {..., 2 dp_0, dq_0, 2 dp_1, dq_1, ...}: 2dp_i at 2i - 1."""
    out = {2 * i - 1: 2.0 * v for i, v in self.dp.items() if v != 0.0}
    out.update({2 * i: v for i, v in self.dq.items() if v != 0.0})
    return dict(sorted(out.items()))

  def is_zero(self) -> bool:
    return not self.dj_vector

  def perturb(self, eps: float) -> JacobiOperator:
    """J_0 + eps dJ."""
    return JacobiOperator(
      side=Side.WHOLE, p={i: 1.0 + eps * v for i, v in self.dp.items()},
      q={i: eps * v for i, v in self.dq.items()})


def random_direction(rng: np.random.Generator,
                     support: int) -> PerturbationDirection:
  return PerturbationDirection(
    dp={i: float(rng.uniform(-1.0, 1.0)) for i in range(support)},
    dq={i: float(rng.uniform(-1.0, 1.0)) for i in range(support)})


def dT_linearization(dj: PerturbationDirection, l: int) -> np.ndarray:
  """d T_l(J) e_0 at J_0, entries for rows -l..l.

  Row -l + 2r carries c (dp_{r-l+1} + ... + dp_r), c = 1 at the two ends
  and 2 inside; row -l + 2r + 1 carries dq_{r-l+1} + ... + dq_r.
  """
  if l < 1:
    raise ValidationError(f"l must be positive, got {l}")
  out = np.zeros(2 * l + 1)
  for s in range(2 * l + 1):
    r, odd = divmod(s, 2)
    indices = range(r - l + 1, r + 1)
    if odd:
      out[s] = sum(dj.dq.get(j, 0.0) for j in indices)
    else:
      weight = 1.0 if r in (0, l) else 2.0
      out[s] = weight * sum(dj.dp.get(j, 0.0) for j in indices)
  return out


def dT_finite_difference(dj: PerturbationDirection, l: int,
                         eps: float) -> np.ndarray:
  """(T_l(J_0 + eps dJ) - T_l(J_0)) e_0 / eps for rows -l..l."""
  perturbed = dj.perturb(eps)
  if perturbed.is_free():
    return np.zeros(2 * l + 1)
  lo = min(_support(perturbed)[0], 0) - 2 * l - 2
  hi = max(_support(perturbed)[1], 0) + 2 * l + 2
  columns = []
  for operator in (perturbed, JacobiOperator.free(Side.WHOLE)):
    matrix = dense_window(operator, lo, hi)
    prev, cur = 2.0 * np.eye(matrix.shape[0]), matrix.copy()
    for _ in range(l - 1):
      prev, cur = cur, matrix @ cur - prev
    columns.append(cur[-l - lo:l + 1 - lo, -lo])
  return (columns[0] - columns[1]) / eps


def symbol_coefficients(a: ChebUExpansion) -> Dict[int, float]:
  """Fourier coefficients of A(2 cos theta) = sum_l c_l sin(l theta)/sin(theta)."""
  out: Dict[int, float] = {}
  for l, c in a.items():
    for offset in range(-(l - 1), l, 2):
      out[offset] = out.get(offset, 0.0) + c
  return out


def quadratic_form(a: ChebUExpansion, dj: PerturbationDirection) -> float:
  """(1/2) <dj, A(J_0) dj>, A(J_0) acting by convolution on the dj lattice."""
  vector = dj.dj_vector
  symbol = symbol_coefficients(a)
  total = 0.0
  for i, x in vector.items():
    for offset, coeff in symbol.items():
      y = vector.get(i + offset)
      if y is not None:
        total += x * coeff * y
  return 0.5 * total


class R2Report(NamedTuple):
  dq_norm: float
  dp_norm: float


def r2_condition_report(dj: PerturbationDirection, l: int) -> R2Report:
  """Squared norms of {dq_{i+1}+...+dq_{i+l}} and {2dp_{i+1}+...+2dp_{i+l}}."""
  if l < 1:
    raise ValidationError(f"l must be positive, got {l}")
  norms = []
  for values, factor in ((dj.dq, 1.0), (dj.dp, 2.0)):
    if not values:
      norms.append(0.0)
      continue
    first, last = min(values), max(values)
    norms.append(
      sum((factor * sum(values.get(i + k, 0.0) for k in range(1, l + 1)))**2
          for i in range(first - l, last)))
  return R2Report(dq_norm=norms[0], dp_norm=norms[1])
