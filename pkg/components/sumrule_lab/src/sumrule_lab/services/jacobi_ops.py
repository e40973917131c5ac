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
Jacobi operators with eventually free coefficient sequences.

A half-line operator acts on l2(Z_+) by
  J e_n = p_n e_{n-1} + q_n e_n + p_{n+1} e_{n+1},
so that the matrix entry J[k-1, k] is p_k (k >= 1). The whole-line variant
uses the same recurrence for every integer n. Coefficients are stored
sparsely; p_k = 1 and q_k = 0 wherever nothing is stored.
"""
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Tuple, Union
import numpy as np
from common.utils.errors import ValidationError
from common.utils.logging_handler import Logger
from sumrule_lab.services.cheb_core import PowerPoly

Vector = Dict[int, float]


class Side(str, Enum):
  """ Enum class for operator side """
  HALF = "half"
  WHOLE = "whole"


def _clean(values: Mapping, free: float) -> Dict[int, float]:
  out = {}
  for k, v in values.items():
    try:
      index, value = int(k), float(v)
    except (TypeError, ValueError) as e:
      raise ValidationError(f"Invalid coefficient entry {k!r}: {v!r}",
                            data={str(k): v}) from e
    if not math.isfinite(value):
      raise ValidationError(f"Coefficient {index} is not finite")
    if value != free:
      out[index] = value
  return out


@dataclass(frozen=True)
class JacobiOperator:
  """Jacobi operator J equal to J_0 outside a finite index window."""
  side: Side = Side.HALF
  p: Dict[int, float] = field(default_factory=dict)
  q: Dict[int, float] = field(default_factory=dict)

  def __post_init__(self):
    object.__setattr__(self, "side", Side(self.side))
    p = _clean(self.p, 1.0)
    q = _clean(self.q, 0.0)
    bad = {k: v for k, v in p.items() if v <= 0.0}
    if bad:
      raise ValidationError("Off-diagonal coefficients must be positive",
                            data={"p": bad})
    if self.side == Side.HALF:
      if any(k < 1 for k in p):
        raise ValidationError("Half-line p indices start at 1",
                              data={"p": sorted(p)})
      if any(k < 0 for k in q):
        raise ValidationError("Half-line q indices start at 0",
                              data={"q": sorted(q)})
    object.__setattr__(self, "p", p)
    object.__setattr__(self, "q", q)

  @classmethod
  def free(cls, side: Union[Side, str] = Side.HALF) -> "JacobiOperator":
    return cls(side=Side(side))

  @property
  def is_half_line(self) -> bool:
    return self.side == Side.HALF

  def is_free(self) -> bool:
    return not self.p and not self.q

  def p_at(self, k: int) -> float:
    if self.is_half_line and k < 1:
      return 0.0
    return self.p.get(k, 1.0)

  def q_at(self, k: int) -> float:
    if self.is_half_line and k < 0:
      return 0.0
    return self.q.get(k, 0.0)

  def p_array(self, lo: int, hi: int) -> np.ndarray:
    return np.array([self.p_at(k) for k in range(lo, hi + 1)])

  def q_array(self, lo: int, hi: int) -> np.ndarray:
    return np.array([self.q_at(k) for k in range(lo, hi + 1)])

  @property
  def rank_window(self) -> Tuple[int, int]:
    """Smallest index range holding every non-free p_k and q_k."""
    keys = list(self.p) + list(self.q)
    if not keys:
      return (0, 0)
    return (min(keys), max(keys))

  @property
  def rank(self) -> int:
    """Half-line rank index n: p_k = 1 and q_k = 0 for every k >= n."""
    n = 1
    if self.p:
      n = max(n, max(self.p) + 1)
    if self.q:
      n = max(n, max(self.q) + 1)
    return n

  def to_dict(self) -> dict:
    return {
      "side": self.side.value,
      "p": {str(k): v for k, v in sorted(self.p.items())},
      "q": {str(k): v for k, v in sorted(self.q.items())},
    }


@dataclass(frozen=True)
class FiniteTruncation:
  """n x n principal block: diagonal q_0..q_{n-1}, off-diagonal p_1..p_{n-1}."""
  size: int
  diagonal: Tuple[float, ...]
  off_diagonal: Tuple[float, ...]

  def __post_init__(self):
    if len(self.diagonal) != self.size or \
        len(self.off_diagonal) != max(self.size - 1, 0):
      raise ValidationError("Truncation arrays do not match its size")
    if any(v <= 0.0 for v in self.off_diagonal):
      raise ValidationError("Truncation off-diagonal must be positive")

  def dense(self) -> np.ndarray:
    return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + \
      np.diag(self.off_diagonal, -1)


def from_json(data: Union[str, Mapping]) -> JacobiOperator:
  """Builds an operator from {"side": ..., "p": {...}, "q": {...}}."""
  if isinstance(data, str):
    try:
      data = json.loads(data)
    except json.JSONDecodeError as e:
      raise ValidationError(f"Operator is not valid JSON: {e}") from e
  if not isinstance(data, Mapping):
    raise ValidationError("Operator JSON must be an object")
  unknown = set(data) - {"side", "p", "q"}
  if unknown:
    raise ValidationError(f"Unknown operator fields {sorted(unknown)}")
  side = data.get("side", "half")
  if side not in (Side.HALF.value, Side.WHOLE.value):
    raise ValidationError(f"Operator side must be half or whole, got {side}")
  return JacobiOperator(side=Side(side), p=dict(data.get("p") or {}),
                        q=dict(data.get("q") or {}))


def to_json(J: JacobiOperator) -> str:
  return json.dumps(J.to_dict(), sort_keys=True)


def random_operator(rng: np.random.Generator, rank: int,
                    side: Union[Side, str] = Side.HALF,
                    spread_p: float = 0.4,
                    spread_q: float = 0.4) -> JacobiOperator:
  """Random finite-rank operator with |p - 1| <= spread_p, |q| <= spread_q.

  Half-line: q_0..q_{rank-1} and p_1..p_{rank-1} are drawn. Whole-line:
  q and p are drawn on indices 0..rank-1.
  """
  if rank < 1:
    raise ValidationError(f"rank must be positive, got {rank}")
  side = Side(side)
  q = {k: float(rng.uniform(-spread_q, spread_q)) for k in range(rank)}
  p_indices = range(1, rank) if side == Side.HALF else range(rank)
  p = {k: float(1.0 + rng.uniform(-spread_p, spread_p)) for k in p_indices}
  return JacobiOperator(side=side, p=p, q=q)


def gershgorin_bounds(J: JacobiOperator) -> Tuple[float, float]:
  """Interval containing the spectrum, from row sums of |J|."""
  lo, hi = -2.0, 2.0
  first, last = J.rank_window
  for i in range(first - 1, last + 2):
    if J.is_half_line and i < 0:
      continue
    radius = J.p_at(i) + J.p_at(i + 1)
    lo = min(lo, J.q_at(i) - radius)
    hi = max(hi, J.q_at(i) + radius)
  return lo, hi


def spectral_radius_bound(J: JacobiOperator) -> float:
  lo, hi = gershgorin_bounds(J)
  return max(abs(lo), abs(hi))


def dense_window(J: JacobiOperator, lo: int, hi: int) -> np.ndarray:
  """Restriction of J to indices lo..hi (lo is clipped to 0 on the half-line)."""
  if J.is_half_line:
    lo = max(lo, 0)
  if hi < lo:
    raise ValidationError(f"Empty window [{lo}, {hi}]")
  diagonal = J.q_array(lo, hi)
  off = J.p_array(lo + 1, hi)
  return np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)


def free_like(J: JacobiOperator) -> JacobiOperator:
  return JacobiOperator.free(J.side)


def apply(J: JacobiOperator, v: Mapping[int, float]) -> Vector:
  """Banded product J v for a finitely supported v."""
  out: Vector = {}
  for n, value in v.items():
    if value == 0.0:
      continue
    if J.is_half_line and n < 0:
      raise ValidationError(f"Half-line vector has negative index {n}")
    contributions = ((n - 1, J.p_at(n)), (n, J.q_at(n)), (n + 1, J.p_at(n + 1)))
    for index, coeff in contributions:
      if J.is_half_line and index < 0:
        continue
      out[index] = out.get(index, 0.0) + coeff * value
  return {k: v for k, v in sorted(out.items()) if v != 0.0}


def shift(J: JacobiOperator, k: int) -> JacobiOperator:
  """J^{(k)} = (S*)^k J S^k: coefficient indices move down by k."""
  if not J.is_half_line:
    raise ValidationError("shift is defined for half-line operators")
  if k < 1:
    raise ValidationError(f"shift needs k >= 1, got {k}")
  p = {i - k: v for i, v in J.p.items() if i - k >= 1}
  q = {i - k: v for i, v in J.q.items() if i - k >= 0}
  return JacobiOperator(side=Side.HALF, p=p, q=q)


def _poly_of_matrix(poly: PowerPoly, matrix: np.ndarray) -> np.ndarray:
  result = np.zeros_like(matrix)
  identity = np.eye(matrix.shape[0])
  for c in reversed(poly.coeffs):
    result = result @ matrix + c * identity
  return result


def diag_entry_of_poly(J: JacobiOperator, phi: PowerPoly, k: int) -> float:
  """<(Phi(J) - Phi(J_0)) e_k, e_k> computed on a window of half-width d+1."""
  d = max(phi.degree, 0)
  lo, hi = k - d - 1, k + d + 1
  if J.is_half_line:
    lo = max(lo, 0)
  window = dense_window(J, lo, hi)
  free = dense_window(free_like(J), lo, hi)
  diff = _poly_of_matrix(phi, window) - _poly_of_matrix(phi, free)
  return float(diff[k - lo, k - lo])


def _power_diag_diff(J: JacobiOperator, k: int) -> Tuple[int, np.ndarray]:
  first, last = J.rank_window
  lo, hi = first - 2 * k - 1, last + 2 * k + 1
  if J.is_half_line:
    lo = max(lo, 0)
  window = dense_window(J, lo, hi)
  free = dense_window(free_like(J), lo, hi)
  diff = np.diag(np.linalg.matrix_power(window, k)) - \
    np.diag(np.linalg.matrix_power(free, k))
  return lo, diff


def trace_tk(J: JacobiOperator, k: int) -> float:
  """t_k = tr(J^k - J_0^k) for k >= 1 and t_0 = sum of log p_j."""
  if k < 0:
    raise ValidationError(f"trace order must be non-negative, got {k}")
  if k == 0:
    return float(sum(math.log(v) for v in J.p.values()))
  if J.is_free():
    return 0.0
  first, last = J.rank_window
  lo, diff = _power_diag_diff(J, k)
  indices = np.arange(lo, lo + len(diff))
  mask = (indices >= first - k) & (indices <= last + k)
  return float(np.sum(diff[mask]))


def _shift_vector(v: Vector, k: int) -> Vector:
  return {i - k: x for i, x in v.items() if i - k >= 0}


def shift_lemma_check(J: JacobiOperator, k: int, l: int, n: int,
                      tol: float = 1e-12) -> bool:
  """Checks (J^{(k)})^l e_n == (J^l)^{(k)} e_n entrywise.

  The identity is only claimed for n >= l - 1; smaller n is reported in the
  log and the comparison is still returned.
  """
  if k < 1 or l < 0 or n < 0:
    raise ValidationError(f"invalid shift lemma arguments k={k} l={l} n={n}")
  if n < l - 1:
    Logger.warning(f"shift lemma does not cover n={n} < l-1={l - 1}")
  shifted = shift(J, k)
  left: Vector = {n: 1.0}
  right: Vector = {n + k: 1.0}
  for _ in range(l):
    left = apply(shifted, left)
    right = apply(J, right)
  right = _shift_vector(right, k)
  keys = set(left) | set(right)
  return all(abs(left.get(i, 0.0) - right.get(i, 0.0)) <= tol for i in keys)


def truncation(J: JacobiOperator, n: int) -> FiniteTruncation:
  """J~(n): the upper-left n x n block of a half-line operator."""
  if not J.is_half_line:
    raise ValidationError("truncations are taken of half-line operators")
  if n < 1:
    raise ValidationError(f"truncation size must be positive, got {n}")
  return FiniteTruncation(size=n,
                          diagonal=tuple(J.q_array(0, n - 1)),
                          off_diagonal=tuple(J.p_array(1, n - 1)))


def truncation_trace(pair: Tuple[FiniteTruncation, FiniteTruncation],
                     k: int) -> float:
  """tr(J~(n)^k - J~_0(n)^k) by dense powering."""
  perturbed, free = pair
  if perturbed.size != free.size:
    raise ValidationError(
      f"Truncation sizes differ: {perturbed.size} != {free.size}")
  if k < 0:
    raise ValidationError(f"trace order must be non-negative, got {k}")
  return float(
    np.trace(np.linalg.matrix_power(perturbed.dense(), k)) -
    np.trace(np.linalg.matrix_power(free.dense(), k)))

