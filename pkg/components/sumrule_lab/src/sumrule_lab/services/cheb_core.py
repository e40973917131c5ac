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
Chebyshev algebra on [-2, 2] and truncated Laurent series at infinity.

Conventions used throughout the package:
  U_l has degree l - 1, with U_0 = 0, U_1 = 1, U_{l+1} = z U_l - U_{l-1};
  T_0 = 2, T_1 = z, T_{l+1} = z T_l - T_{l-1};
  so that U_l = (zeta^-l - zeta^l) / (zeta^-1 - zeta) and
  T_l = zeta^-l + zeta^l when z = zeta + 1/zeta.
"""
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple, Union
import numpy as np
from numpy.polynomial import chebyshev as np_cheb
from numpy.polynomial import polynomial as np_poly
from scipy import special
from common.utils.errors import ValidationError, ResourceNotFoundException
from sumrule_lab.config import NONNEGATIVE_GRID_POINTS, NONNEGATIVE_TOL
from sumrule_lab.utils.errors import TruncationOrderError

Number = Union[float, complex]


def _trim(values: Iterable[float]) -> Tuple[float, ...]:
  out = [float(v) for v in values]
  while out and out[-1] == 0.0:
    out.pop()
  return tuple(out)


def _recurrence_sum(coeffs, z, first, second):
  """Evaluates sum_i coeffs[i] * Y_i(z) for Y_{i+1} = z Y_i - Y_{i-1}."""
  z = np.asarray(z)
  prev = np.full(z.shape, first, dtype=np.result_type(z, float))
  cur = prev * 0 + second
  total = prev * 0
  if len(coeffs) > 0:
    total = total + coeffs[0] * prev
  for c in coeffs[1:]:
    total = total + c * cur
    prev, cur = cur, z * cur - prev
  return total[()] if total.ndim == 0 else total


def eval_U(l: int, z):
  """Value of U_l at z (scalar or array)."""
  if l < 0:
    raise ValidationError(f"U index must be non-negative, got {l}")
  if l == 0:
    return _recurrence_sum([0.0], z, 0.0, 1.0)
  return _recurrence_sum([0.0] * l + [1.0], z, 0.0, 1.0)


def eval_T(l: int, z):
  """Value of T_l at z (scalar or array)."""
  if l < 0:
    raise ValidationError(f"T index must be non-negative, got {l}")
  return _recurrence_sum([0.0] * l + [1.0], z, 2.0, z)


@dataclass(frozen=True)
class PowerPoly:
  """Polynomial in the monomial basis, coeffs[k] multiplies z**k."""
  coeffs: Tuple[float, ...] = ()

  def __post_init__(self):
    object.__setattr__(self, "coeffs", _trim(self.coeffs))

  @property
  def degree(self) -> int:
    return len(self.coeffs) - 1

  def coeff(self, k: int) -> float:
    return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

  def __call__(self, z):
    if not self.coeffs:
      return (0.0 * np.asarray(z))[()]
    return np_poly.polyval(z, self.coeffs)

  def __add__(self, other: "PowerPoly") -> "PowerPoly":
    return PowerPoly(tuple(np_poly.polyadd(self.coeffs or (0.0,),
                                           other.coeffs or (0.0,))))

  def __sub__(self, other: "PowerPoly") -> "PowerPoly":
    return self + other.scale(-1.0)

  def scale(self, factor: float) -> "PowerPoly":
    return PowerPoly(tuple(factor * c for c in self.coeffs))

  def derivative(self) -> "PowerPoly":
    if len(self.coeffs) <= 1:
      return PowerPoly()
    return PowerPoly(tuple(np_poly.polyder(self.coeffs)))


@dataclass(frozen=True)
class ChebUExpansion:
  """A = sum_l c_l U_l, stored densely as coeffs[l - 1] = c_l."""
  coeffs: Tuple[float, ...] = ()

  def __post_init__(self):
    object.__setattr__(self, "coeffs", _trim(self.coeffs))

  @classmethod
  def from_map(cls, coeffs: Mapping[int, float]) -> "ChebUExpansion":
    if not coeffs:
      return cls()
    indices = [int(l) for l in coeffs]
    if min(indices) < 1:
      raise ValidationError("U-expansion indices start at 1",
                            data={"indices": indices})
    dense = [0.0] * max(indices)
    for l, c in coeffs.items():
      dense[int(l) - 1] += float(c)
    return cls(tuple(dense))

  @classmethod
  def basis(cls, l: int) -> "ChebUExpansion":
    return cls.from_map({l: 1.0})

  @property
  def degree(self) -> int:
    """Polynomial degree m; U_l contributes degree l - 1."""
    return len(self.coeffs) - 1

  def is_zero(self) -> bool:
    return not self.coeffs

  def coeff(self, l: int) -> float:
    return self.coeffs[l - 1] if 1 <= l <= len(self.coeffs) else 0.0

  def items(self):
    return [(l + 1, c) for l, c in enumerate(self.coeffs) if c != 0.0]

  def to_map(self) -> Dict[int, float]:
    return dict(self.items())

  def __call__(self, z):
    return _recurrence_sum([0.0] + list(self.coeffs), z, 0.0, 1.0)

  def __add__(self, other: "ChebUExpansion") -> "ChebUExpansion":
    size = max(len(self.coeffs), len(other.coeffs))
    return ChebUExpansion(
      tuple(self.coeff(l) + other.coeff(l) for l in range(1, size + 1)))

  def scale(self, factor: float) -> "ChebUExpansion":
    return ChebUExpansion(tuple(factor * c for c in self.coeffs))

  def __mul__(self, other):
    if isinstance(other, ChebUExpansion):
      return u_product(self, other)
    return self.scale(float(other))

  __rmul__ = __mul__

  def label(self) -> str:
    return " + ".join(f"{c:g}*U{l}" for l, c in self.items()) or "0"


def u_product(f: ChebUExpansion, g: ChebUExpansion) -> ChebUExpansion:
  """U-expansion of the pointwise product f*g.

  Uses U_m U_n = sum of U_k for k = |m-n|+1, |m-n|+3, ..., m+n-1.
  """
  out: Dict[int, float] = {}
  for m, a in f.items():
    for n, b in g.items():
      for k in range(abs(m - n) + 1, m + n, 2):
        out[k] = out.get(k, 0.0) + a * b
  return ChebUExpansion.from_map(out)


def _basis_power(l: int, first, second) -> np.ndarray:
  prev = np.array(first, dtype=float)
  cur = np.array(second, dtype=float)
  if l == 0:
    return prev
  for _ in range(l - 1):
    prev, cur = cur, np_poly.polysub(np_poly.polymulx(cur), prev)
  return cur


def t_to_power(l: int) -> PowerPoly:
  """Monomial coefficients of T_l."""
  return PowerPoly(tuple(_basis_power(l, [2.0], [0.0, 1.0])))


def u_to_power(a: ChebUExpansion) -> PowerPoly:
  """Monomial coefficients of sum_l c_l U_l."""
  total = np.zeros(1)
  for l, c in a.items():
    total = np_poly.polyadd(total, c * _basis_power(l - 1, [1.0], [0.0, 1.0]))
  return PowerPoly(tuple(total))


def to_textbook_chebyshev(a: ChebUExpansion) -> np_cheb.Chebyshev:
  """Converts A(z) to a numpy Chebyshev series in x = z/2 on [-1, 1].

  Here U_l(z) equals the textbook second-kind polynomial of degree l - 1
  evaluated at z/2; the returned series is in the first-kind basis numpy
  uses, so that series(z / 2) == A(z).
  """
  power = u_to_power(a).coeffs or (0.0,)
  in_x = [c * 2.0**k for k, c in enumerate(power)]
  return np_cheb.Chebyshev(np_cheb.poly2cheb(in_x))


# T_k(0) = 2 cos(k pi / 2)
_T_AT_ZERO = (2.0, 0.0, -2.0, 0.0)


def phi_t_coeffs(a: ChebUExpansion) -> Dict[int, float]:
  """T-basis coefficients of Phi, with Phi' = sum_l c_l T_l and Phi(0) = 0.

  Key 0 carries the constant as a multiple of T_0 = 2.
  """
  if a.is_zero():
    raise ValidationError("A must not be the zero expansion")
  phi: Dict[int, float] = {}
  for l, c in a.items():
    phi[l + 1] = phi.get(l + 1, 0.0) + c / (l + 1)
    if l >= 2:
      phi[l - 1] = phi.get(l - 1, 0.0) - c / (l - 1)
  at_zero = sum(c * _T_AT_ZERO[k % 4] for k, c in phi.items())
  phi[0] = -at_zero / 2.0
  return {k: c for k, c in sorted(phi.items()) if c != 0.0}


def phi_from_A(a: ChebUExpansion) -> Tuple[PowerPoly, float]:
  """Phi (power basis, Phi(0) = 0) and a = 2 c_1 from A."""
  phi_t = phi_t_coeffs(a)
  total = np.zeros(1)
  for k, c in phi_t.items():
    if k > 0:
      total = np_poly.polyadd(total, c * np.asarray(t_to_power(k).coeffs))
  total[0] = 0.0
  return PowerPoly(tuple(total)), 2.0 * a.coeff(1)


def is_nonnegative(a: ChebUExpansion,
                   points: int = NONNEGATIVE_GRID_POINTS) -> bool:
  """Samples A on [-2, 2] and reports whether it is nonnegative."""
  values = a(np.linspace(-2.0, 2.0, points))
  scale = 1.0 + float(np.max(np.abs(values)))
  return bool(np.min(values) >= -NONNEGATIVE_TOL * scale)


def semicircle_quadrature(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
  """Gauss rule for the weight sqrt(4 - x^2) on [-2, 2].

  Nodes are 2 cos(j pi / (N + 1)); sum(w * f(x)) integrates
  f(x) sqrt(4 - x^2) exactly for polynomials f of degree < 2N.
  """
  if nodes < 1:
    raise ValidationError(f"need at least one node, got {nodes}")
  t, w = special.roots_chebyu(nodes)
  order = np.argsort(t)
  return 2.0 * t[order], 4.0 * w[order]


_NAMED_A = {
  "one": lambda: ChebUExpansion.basis(1),
  "U2sq": lambda: u_product(ChebUExpansion.basis(2), ChebUExpansion.basis(2)),
  "U3sq": lambda: u_product(ChebUExpansion.basis(3), ChebUExpansion.basis(3)),
  "U1pU2sq": lambda: u_product(
    ChebUExpansion.from_map({1: 1.0, 2: 1.0}),
    ChebUExpansion.from_map({1: 1.0, 2: 1.0})),
}


def parse_A(spec: str) -> ChebUExpansion:
  """Builds A from a preset name or a comma separated U-coefficient list.

  Accepted forms: "one", "U2sq", "U3sq", "U1pU2sq", "UmUn:m,n",
  "Usq:n" and explicit "c1,c2,...".
  """
  spec = (spec or "").strip()
  if spec in _NAMED_A:
    return _NAMED_A[spec]()
  try:
    if spec.startswith("UmUn:"):
      m, n = (int(v) for v in spec[len("UmUn:"):].split(","))
      if m < 1 or n < 1:
        raise ValueError
      return u_product(ChebUExpansion.basis(m), ChebUExpansion.basis(n))
    if spec.startswith("Usq:"):
      n = int(spec[len("Usq:"):])
      if n < 1:
        raise ValueError
      return u_product(ChebUExpansion.basis(n), ChebUExpansion.basis(n))
  except ValueError as e:
    raise ValidationError(f"Malformed A spec '{spec}'") from e
  if spec and spec[0].isalpha():
    raise ResourceNotFoundException(f"Unknown A preset '{spec}'")
  try:
    expansion = ChebUExpansion(tuple(float(v) for v in spec.split(",")))
  except ValueError as e:
    raise ValidationError(f"Malformed A spec '{spec}'") from e
  if expansion.is_zero():
    raise ValidationError("A must not be the zero expansion")
  return expansion


@dataclass(frozen=True)
class LaurentSeries:
  """Truncated series at infinity.

  coeffs[i] multiplies z**(top_degree - i); only len(coeffs) terms are known.
  """
  top_degree: int
  coeffs: Tuple[float, ...]

  def __post_init__(self):
    object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

  @property
  def K(self) -> int:  # pylint: disable=invalid-name
    return len(self.coeffs)

  @property
  def bottom_degree(self) -> int:
    return self.top_degree - self.K + 1

  @property
  def array(self) -> np.ndarray:
    return np.asarray(self.coeffs, dtype=float)

  def coeff(self, power: int) -> float:
    """Coefficient of z**power; zero above the top, error below the bottom."""
    if power > self.top_degree:
      return 0.0
    if power < self.bottom_degree:
      raise TruncationOrderError(
        f"z^{power} is below the retained order z^{self.bottom_degree}")
    return self.coeffs[self.top_degree - power]

  def polynomial_part(self) -> PowerPoly:
    if self.top_degree < 0:
      return PowerPoly()
    if self.bottom_degree > 0:
      raise TruncationOrderError("polynomial part is not fully retained")
    return PowerPoly(tuple(self.coeff(k) for k in range(self.top_degree + 1)))

  def shifted(self, top_degree: int) -> "LaurentSeries":
    """Same retained range re-expressed with a higher top (zero padded)."""
    if top_degree < self.top_degree:
      raise TruncationOrderError("cannot lower the top degree")
    pad = top_degree - self.top_degree
    return LaurentSeries(top_degree, (0.0,) * pad + self.coeffs)


def laurent_from_poly(poly: Union[PowerPoly, ChebUExpansion],
                      K: int) -> LaurentSeries:  # pylint: disable=invalid-name
  """Exact series of a polynomial, zero padded to K terms."""
  if isinstance(poly, ChebUExpansion):
    poly = u_to_power(poly)
  if poly.degree < 0:
    return LaurentSeries(0, (0.0,) * K)
  reversed_coeffs = list(reversed(poly.coeffs))[:K]
  reversed_coeffs += [0.0] * (K - len(reversed_coeffs))
  return LaurentSeries(poly.degree, tuple(reversed_coeffs))


def laurent_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
  top = max(a.top_degree, b.top_degree)
  bottom = max(a.bottom_degree, b.bottom_degree)
  if bottom > top:
    raise TruncationOrderError("no common retained range")
  return LaurentSeries(
    top, tuple(a.coeff(p) + b.coeff(p) for p in range(top, bottom - 1, -1)))


def laurent_scale(a: LaurentSeries, factor: float) -> LaurentSeries:
  return LaurentSeries(a.top_degree, tuple(factor * c for c in a.coeffs))


def laurent_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
  """Product; keeps min(K_a, K_b) terms, the ones both factors determine."""
  keep = min(a.K, b.K)
  product = np.convolve(a.array, b.array)[:keep]
  return LaurentSeries(a.top_degree + b.top_degree, tuple(product))


def laurent_inv(a: LaurentSeries) -> LaurentSeries:
  lead = a.coeffs[0] if a.K else 0.0
  if lead == 0.0:
    raise ValidationError("cannot invert a series with zero leading term")
  inv = np.zeros(a.K)
  inv[0] = 1.0 / lead
  src = a.array
  for n in range(1, a.K):
    inv[n] = -np.dot(src[1:n + 1], inv[n - 1::-1]) / lead
  return LaurentSeries(-a.top_degree, tuple(inv))


def laurent_log(a: LaurentSeries) -> LaurentSeries:
  """log of a series with top degree 0 and positive leading coefficient."""
  lead = a.coeffs[0] if a.K else 0.0
  if a.top_degree != 0 or lead == 0.0:
    raise ValidationError(
      "log needs a nonzero leading coefficient at z^0",
      data={"top_degree": a.top_degree, "lead": lead})
  if lead < 0:
    raise ValidationError("log needs a positive leading coefficient",
                          data={"lead": lead})
  f = a.array / lead
  out = np.zeros(a.K)
  out[0] = math.log(lead)
  for n in range(1, a.K):
    k = np.arange(1, n)
    out[n] = f[n] - np.dot(k * out[1:n], f[n - 1:0:-1]) / n
  return LaurentSeries(0, tuple(out))


def laurent_exp(a: LaurentSeries) -> LaurentSeries:
  """exp of a series without positive powers."""
  if a.top_degree > 0:
    raise ValidationError("exp needs a series without positive powers")
  s = a.shifted(0).array
  out = np.zeros(len(s))
  out[0] = math.exp(s[0])
  for n in range(1, len(s)):
    k = np.arange(1, n + 1)
    out[n] = np.dot(k * s[1:n + 1], out[n - 1::-1]) / n
  return LaurentSeries(0, tuple(out))


def laurent_sqrt(a: LaurentSeries) -> LaurentSeries:
  """Square root of a series with even top degree and positive lead."""
  lead = a.coeffs[0] if a.K else 0.0
  if a.top_degree % 2 or lead <= 0.0:
    raise ValidationError("sqrt needs an even top degree and positive lead")
  normalized = LaurentSeries(0, a.coeffs)
  half = laurent_scale(laurent_log(normalized), 0.5)
  root = laurent_exp(half)
  return LaurentSeries(a.top_degree // 2, root.coeffs)


def _catalan(n: int) -> int:
  return special.comb(2 * n, n, exact=True) // (n + 1)


def laurent_sqrt_z2m4(K: int) -> LaurentSeries:  # pylint: disable=invalid-name
  """sqrt(z^2 - 4) = z - 2/z - 2/z^3 - 4/z^5 - ... with K terms."""
  coeffs = np.zeros(K)
  for i in range(0, K, 2):
    j = i // 2
    coeffs[i] = 1.0 if j == 0 else -2.0 * _catalan(j - 1)
  return LaurentSeries(1, tuple(coeffs))


def laurent_zeta(K: int) -> LaurentSeries:  # pylint: disable=invalid-name
  """zeta(z) = 1/z + 1/z^3 + 2/z^5 + ... (Catalan numbers) with K terms."""
  coeffs = np.zeros(K)
  for i in range(0, K, 2):
    coeffs[i] = _catalan(i // 2)
  return LaurentSeries(-1, tuple(coeffs))


def laurent_eval(a: LaurentSeries, z: Number) -> Number:
  """Evaluates the retained terms at z."""
  powers = (a.top_degree - np.arange(a.K)).astype(float)
  if np.iscomplexobj(z):
    return complex(np.sum(a.array * np.power(complex(z), powers)))
  return float(np.sum(a.array * np.power(float(z), powers)))
