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
  Unit tests for the Chebyshev and Laurent series core
"""
# disabling pylint rules that conflict with pytest fixtures
# pylint: disable=unused-argument,redefined-outer-name,unused-import
import math
import numpy as np
import pytest
from common.utils.errors import ResourceNotFoundException, ValidationError
from sumrule_lab.services.cheb_core import (
  ChebUExpansion, LaurentSeries, PowerPoly, eval_T, eval_U, is_nonnegative,
  laurent_add, laurent_eval, laurent_exp, laurent_inv, laurent_log,
  laurent_mul, laurent_sqrt, laurent_sqrt_z2m4, laurent_zeta, parse_A,
  phi_from_A, phi_t_coeffs, semicircle_quadrature, t_to_power,
  to_textbook_chebyshev, u_product, u_to_power)
from sumrule_lab.utils.errors import TruncationOrderError


def test_low_degree_values():
  z = np.array([-1.5, 0.3, 2.0, 3.7])
  assert np.allclose(eval_U(1, z), 1.0)
  assert np.allclose(eval_U(2, z), z)
  assert np.allclose(eval_U(3, z), z**2 - 1.0)
  assert np.allclose(eval_T(0, z), 2.0)
  assert np.allclose(eval_T(1, z), z)
  assert np.allclose(eval_T(2, z), z**2 - 2.0)
  assert np.allclose(eval_T(3, z), z**3 - 3.0 * z)


def test_trigonometric_form():
  theta = np.linspace(0.1, 3.0, 7)
  x = 2.0 * np.cos(theta)
  for l in range(1, 6):
    assert np.allclose(eval_U(l, x), np.sin(l * theta) / np.sin(theta))
    assert np.allclose(eval_T(l, x), 2.0 * np.cos(l * theta))


def test_negative_index_rejected():
  with pytest.raises(ValidationError):
    eval_U(-1, 0.5)
  with pytest.raises(ValidationError):
    ChebUExpansion.from_map({0: 1.0})


def test_u_product_rule():
  u2, u3 = ChebUExpansion.basis(2), ChebUExpansion.basis(3)
  assert u_product(u2, u2).coeffs == (1.0, 0.0, 1.0)
  assert u_product(u2, u3).coeffs == (0.0, 1.0, 0.0, 1.0)
  z = np.linspace(-3.0, 3.0, 11)
  product = u_product(u2 + u3, u3)
  assert np.allclose(product(z), (z + z**2 - 1.0) * (z**2 - 1.0))


def test_expansion_arithmetic():
  a = ChebUExpansion.from_map({1: 2.0, 3: -1.0})
  assert a.degree == 2
  assert a.coeff(2) == 0.0
  assert a.to_map() == {1: 2.0, 3: -1.0}
  assert (a * 2.0).coeffs == (4.0, 0.0, -2.0)
  assert (a + a.scale(-1.0)).is_zero()


def test_power_conversions():
  assert u_to_power(parse_A("U2sq")).coeffs == (0.0, 0.0, 1.0)
  assert t_to_power(3).coeffs == (0.0, -3.0, 0.0, 1.0)
  poly = PowerPoly((1.0, -2.0, 3.0))
  assert poly.derivative().coeffs == (-2.0, 6.0)
  assert (poly - poly).degree == -1
  assert float(PowerPoly()(2.5)) == 0.0


def test_textbook_chebyshev_matches():
  a = ChebUExpansion((0.5, -1.0, 2.0, 0.25))
  series = to_textbook_chebyshev(a)
  z = np.linspace(-2.0, 2.0, 9)
  assert np.allclose(series(z / 2.0), a(z))


def test_phi_of_one():
  phi, a_const = phi_from_A(parse_A("one"))
  assert phi.coeffs == pytest.approx((0.0, 0.0, 0.5))
  assert a_const == 2.0


def test_phi_derivative_is_A():
  a = parse_A("U1pU2sq")
  phi, _ = phi_from_A(a)
  z = np.linspace(-2.5, 2.5, 13)
  # Phi' = sum_l c_l T_l
  expected = sum(c * eval_T(l, z) for l, c in a.items())
  assert np.allclose(phi.derivative()(z), expected)
  assert float(phi(0.0)) == 0.0
  with pytest.raises(ValidationError):
    phi_t_coeffs(ChebUExpansion())


def test_nonnegativity():
  assert is_nonnegative(parse_A("U2sq"))
  assert is_nonnegative(parse_A("one"))
  assert not is_nonnegative(parse_A("1,-1"))


def test_semicircle_quadrature_moments():
  x, w = semicircle_quadrature(50)
  assert np.all(np.diff(x) > 0)
  assert np.sum(w) == pytest.approx(2.0 * math.pi, rel=1e-13)
  assert np.sum(w * x**2) == pytest.approx(2.0 * math.pi, rel=1e-13)
  assert abs(np.sum(w * x**3)) < 1e-12
  with pytest.raises(ValidationError):
    semicircle_quadrature(0)


@pytest.mark.parametrize("spec,coeffs", [
  ("one", (1.0,)),
  ("U2sq", (1.0, 0.0, 1.0)),
  ("UmUn:2,3", (0.0, 1.0, 0.0, 1.0)),
  ("Usq:3", (1.0, 0.0, 1.0, 0.0, 1.0)),
  ("U1pU2sq", (2.0, 2.0, 1.0)),
  ("0.5,0,1", (0.5, 0.0, 1.0)),
])
def test_parse_A(spec, coeffs):
  assert parse_A(spec).coeffs == pytest.approx(coeffs)


def test_parse_A_errors():
  with pytest.raises(ResourceNotFoundException):
    parse_A("bogus")
  for spec in ("UmUn:0,2", "Usq:x", "", "0,0", "1,,2"):
    with pytest.raises(ValidationError):
      parse_A(spec)


def test_sqrt_series_squares_back():
  root = laurent_sqrt_z2m4(8)
  assert root.coeffs[:6] == (1.0, 0.0, -2.0, 0.0, -2.0, 0.0)
  square = laurent_mul(root, root)
  assert square.top_degree == 2
  assert np.allclose(square.array, [1.0, 0.0, -4.0, 0.0, 0.0, 0.0, 0.0, 0.0])
  assert laurent_eval(laurent_sqrt_z2m4(30), 10.0) == \
    pytest.approx(math.sqrt(96.0), rel=1e-13)


def test_zeta_series_inverts_joukowski():
  zeta = laurent_zeta(10)
  total = laurent_add(laurent_inv(zeta), zeta)
  assert total.top_degree == 1
  assert total.coeff(1) == pytest.approx(1.0)
  for power in range(total.bottom_degree, 1):
    assert total.coeff(power) == pytest.approx(0.0, abs=1e-12)


def test_log_exp_round_trip():
  series = LaurentSeries(0, (2.0, 0.5, 0.25, -0.1, 0.3))
  back = laurent_exp(laurent_log(series))
  assert np.allclose(back.array, series.array)
  root = laurent_sqrt(LaurentSeries(2, (1.0, 0.0, -4.0, 0.0, 0.0)))
  assert np.allclose(root.array, [1.0, 0.0, -2.0, 0.0, -2.0])
  with pytest.raises(ValidationError):
    laurent_log(LaurentSeries(1, (1.0, 0.0)))
  with pytest.raises(ValidationError):
    laurent_log(LaurentSeries(0, (-1.0, 0.0)))


def test_series_truncation_guard():
  series = LaurentSeries(1, (1.0, 2.0, 3.0))
  assert series.coeff(3) == 0.0
  assert series.coeff(-1) == 3.0
  with pytest.raises(TruncationOrderError):
    series.coeff(-2)
  assert series.polynomial_part().coeffs == (2.0, 1.0)
  with pytest.raises(TruncationOrderError):
    LaurentSeries(3, (1.0,)).polynomial_part()
