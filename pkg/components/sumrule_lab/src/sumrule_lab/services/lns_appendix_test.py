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
  Unit tests for the whole-line Chebyshev calculus and positivity checks
"""
# disabling pylint rules that conflict with pytest fixtures
# pylint: disable=unused-argument,redefined-outer-name,unused-import
import math
import numpy as np
import pytest
from common.utils.errors import ValidationError
from sumrule_lab.services.cheb_core import ChebUExpansion, parse_A
from sumrule_lab.services.jacobi_ops import (JacobiOperator, Side,
                                             random_operator)
from sumrule_lab.services.lns_appendix import (
  PerturbationDirection, T_of_J, H_chebyshev, a_k_of, band_closed_forms,
  chebyshev_traces, dT_finite_difference, dT_linearization,
  hankel_quadratic_H, hankel_toeplitz_psd, hs_identity_check,
  l2_condition_report, quadratic_form, r2_condition_report, random_direction)
from sumrule_lab.services.sumrules import H_whole_line, killip_simon_H


@pytest.fixture
def whole_free():
  return JacobiOperator.free(Side.WHOLE)


def whole(p=None, q=None):
  return JacobiOperator(side=Side.WHOLE, p=p or {}, q=q or {})


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_free_bands_are_shifts(whole_free, l):
  bands = T_of_J(whole_free, l)
  for k in range(-l, l + 1):
    expected = 1.0 if abs(k) == l else 0.0
    np.testing.assert_array_equal(bands.band(k), expected)


def test_first_bands_are_coefficients(whole_line_operator):
  bands = T_of_J(whole_line_operator, 1)
  rows = bands.rows
  np.testing.assert_allclose(bands.band(1),
                             [whole_line_operator.p_at(i) for i in rows])
  np.testing.assert_allclose(bands.band(0),
                             [whole_line_operator.q_at(i) for i in rows])


@pytest.mark.parametrize("l", [2, 3, 4, 5, 6])
def test_bands_match_closed_forms(whole_line_operator, l):
  bands = T_of_J(whole_line_operator, l)
  closed = band_closed_forms(whole_line_operator, l)
  for k in (l, l - 1, l - 2):
    np.testing.assert_allclose(bands.band(k), closed[k], atol=1e-12)


def test_top_band_is_product_of_p(whole_line_operator):
  bands = T_of_J(whole_line_operator, 2)
  for i, value in zip(bands.rows, bands.band(2)):
    expected = whole_line_operator.p_at(i) * whole_line_operator.p_at(i - 1)
    assert value == pytest.approx(expected, abs=1e-14)


def test_band_arguments(whole_line_operator, rank3_operator):
  with pytest.raises(ValidationError):
    T_of_J(rank3_operator, 2)
  with pytest.raises(ValidationError):
    T_of_J(whole_line_operator, -1)
  with pytest.raises(ValidationError):
    band_closed_forms(whole_line_operator, 1)


def test_free_traces_vanish(whole_free):
  np.testing.assert_array_equal(chebyshev_traces(whole_free, 6), 0.0)
  assert a_k_of(whole_free, 3) == 0.0


def test_low_traces(whole_line_operator):
  a = chebyshev_traces(whole_line_operator, 2)
  assert a[0] == pytest.approx(
    math.log(0.81) + math.log(1.44) + math.log(1.21))
  assert a[1] == pytest.approx(0.05, abs=1e-14)
  assert a[2] == pytest.approx((0.1125 + 2.0 * 0.46) / 2.0, abs=1e-13)


def test_free_hankel_matrix(whole_free):
  matrix, smallest = hankel_toeplitz_psd(whole_free, 4)
  np.testing.assert_array_equal(matrix, np.zeros((4, 4)))
  assert smallest == 0.0


def test_hankel_psd_rank_two():
  J = random_operator(np.random.default_rng(5), 2, side="whole",
                      spread_p=0.3, spread_q=0.3)
  matrix, smallest = hankel_toeplitz_psd(J, 6)
  assert matrix.shape == (6, 6)
  np.testing.assert_allclose(matrix, matrix.T, atol=1e-13)
  assert smallest >= -1e-10


def test_hankel_psd_over_ensemble(whole_line_ensemble):
  for J in whole_line_ensemble:
    _, smallest = hankel_toeplitz_psd(J, 6)
    assert smallest >= -1e-10


def test_hankel_order_limits(whole_line_operator):
  with pytest.raises(ValidationError):
    hankel_toeplitz_psd(whole_line_operator, 0)
  with pytest.raises(ValidationError):
    hankel_toeplitz_psd(whole_line_operator, 13)


def test_H_chebyshev_of_one_is_killip_simon(whole_line_operator,
                                            p_perturbation, whole_free):
  for J in (whole_line_operator, p_perturbation):
    assert H_chebyshev(J, 1, 1) == pytest.approx(killip_simon_H(J),
                                                 rel=1e-12)
  assert H_chebyshev(whole_free, 2, 3) == 0.0
  with pytest.raises(ValidationError):
    H_chebyshev(whole_line_operator, 0, 1)


def test_hankel_quadratic_matches_trace_route(whole_line_ensemble):
  b = parse_A("1,1")
  a = b * b
  for J in whole_line_ensemble[:10]:
    assert hankel_quadratic_H(J, b) == pytest.approx(H_whole_line(J, a),
                                                     abs=1e-11)
  with pytest.raises(ValidationError):
    hankel_quadratic_H(whole_line_ensemble[0], ChebUExpansion())


def test_hs_identity_free(whole_free):
  check = hs_identity_check(whole_free, 2)
  assert check.lhs == 0.0
  assert check.rhs == pytest.approx(0.0, abs=1e-15)


def test_hs_identity_single_p(p_perturbation):
  check = hs_identity_check(p_perturbation, 1)
  expected = 1.69 - 1.0 - math.log(1.69)
  assert check.lhs == pytest.approx(expected, abs=1e-13)
  assert check.rhs == pytest.approx(expected, abs=1e-13)


def test_hs_identity_rank_three():
  J = random_operator(np.random.default_rng(9), 3, side="whole",
                      spread_p=0.3, spread_q=0.3)
  for l in (1, 2, 3, 4):
    assert hs_identity_check(J, l).residual <= 1e-9
  with pytest.raises(ValidationError):
    hs_identity_check(J, 0)


def test_l2_report_examples(whole_free):
  assert l2_condition_report(whole_free, 3) == (0.0, 0.0, 0.0, 0.0)
  c = 0.7
  report = l2_condition_report(whole(q={0: c}), 2)
  assert report.window_q == pytest.approx(2.0 * c * c)
  assert report.window_u == 0.0
  assert report.q_squared == pytest.approx(c**4)
  report = l2_condition_report(whole(p={0: 1.1}), 1)
  assert report.window_u == pytest.approx(0.21**2)
  assert report.u_squared == pytest.approx(0.21**4)
  with pytest.raises(ValidationError):
    l2_condition_report(whole(p={0: 1.1}), 0)


def test_linearization_of_zero_direction():
  zero = PerturbationDirection()
  assert zero.is_zero()
  np.testing.assert_array_equal(dT_linearization(zero, 3), np.zeros(7))
  assert quadratic_form(parse_A("U2sq"), zero) == 0.0
  assert r2_condition_report(zero, 2) == (0.0, 0.0)


def test_linearization_of_J():
  dj = PerturbationDirection(dp={0: 0.3, 1: -0.2}, dq={0: 0.5})
  np.testing.assert_allclose(dT_linearization(dj, 1), [0.3, 0.5, -0.2])


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_linearization_matches_finite_difference(l):
  dj = random_direction(np.random.default_rng([13, l]), 3)
  np.testing.assert_allclose(dT_finite_difference(dj, l, 1e-7),
                             dT_linearization(dj, l), atol=1e-5)


def test_dj_vector_interleaves():
  dj = PerturbationDirection(dp={0: 0.5, 1: 0.25}, dq={0: -1.0})
  assert dj.dj_vector == {-1: 1.0, 0: -1.0, 1: 0.5}
  perturbed = dj.perturb(0.1)
  assert not perturbed.is_half_line
  assert perturbed.p_at(0) == pytest.approx(1.05)
  assert perturbed.p_at(1) == pytest.approx(1.025)
  assert perturbed.q_at(0) == pytest.approx(-0.1)


def test_quadratic_form_of_one_is_half_norm():
  dj = random_direction(np.random.default_rng(21), 4)
  norm = sum(v * v for v in dj.dj_vector.values())
  assert quadratic_form(parse_A("one"), dj) == pytest.approx(0.5 * norm)


@pytest.mark.parametrize("spec", ["one", "U2sq"])
@pytest.mark.parametrize("seed", range(10))
def test_second_order_taylor(spec, seed):
  a = parse_A(spec)
  dj = random_direction(np.random.default_rng([17, seed]), 3)
  form = quadratic_form(a, dj)
  errors = []
  for eps in (1e-2, 1e-3, 1e-4):
    value = H_whole_line(dj.perturb(eps), a)
    errors.append(abs(value / eps**2 - form))
  # the remainder is O(eps) once eps**2 terms are negligible
  assert errors[2] <= 0.2 * errors[1] + 1e-6
  assert errors[2] <= 0.05 * abs(form)


def test_r2_examples():
  report = r2_condition_report(PerturbationDirection(dq={0: 1.0}), 2)
  assert report.dq_norm == pytest.approx(2.0)
  assert report.dp_norm == 0.0
  with pytest.raises(ValidationError):
    r2_condition_report(PerturbationDirection(dq={0: 1.0}), 0)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_r2_matches_quadratic_form(l):
  dj = random_direction(np.random.default_rng([29, l]), 4)
  report = r2_condition_report(dj, l)
  a = parse_A(f"Usq:{l}")
  assert 2.0 * quadratic_form(a, dj) == pytest.approx(
    report.dq_norm + report.dp_norm, rel=1e-12)
