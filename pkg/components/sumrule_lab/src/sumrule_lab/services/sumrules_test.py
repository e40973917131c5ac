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
  Unit tests for both sides of the sum rule
"""
# disabling pylint rules that conflict with pytest fixtures
# pylint: disable=unused-argument,redefined-outer-name,unused-import
import math
import numpy as np
import pytest
from scipy import integrate
from common.utils.errors import ValidationError
from sumrule_lab.services.cheb_core import parse_A
from sumrule_lab.services.jacobi_ops import (JacobiOperator, random_operator,
                                             shift)
from sumrule_lab.services.orthopoly import spectral_data
from sumrule_lab.services.sumrules import (
  F_of, H_A, H_A_partial_sums, H_via_trace, H_whole_line, Lambda_A, eigen_term,
  h_A_at, killip_simon_H, lambda_density, log_integral_term, verify_sum_rule)

WEIGHTS = ["one", "U2sq", "U3sq", "U1pU2sq", "Usq:4"]


def test_F_closed_form():
  one = parse_A("one")
  expected = 2.5 * math.sqrt(2.5**2 - 4.0) / 2.0 - 2.0 * math.acosh(1.25)
  assert F_of(one, 2.5) == pytest.approx(0.48871, abs=1e-5)
  assert F_of(one, 2.5) == pytest.approx(expected, abs=1e-12)
  assert F_of(one, -2.5) == pytest.approx(expected, abs=1e-12)
  assert F_of(one, 2.0 + 1e-12) == pytest.approx(0.0, abs=1e-15)


def test_F_rejects_cut():
  with pytest.raises(ValidationError):
    F_of(parse_A("one"), 1.5)


def test_free_lambda_density_vanishes(free_operator):
  density = lambda_density(spectral_data(free_operator), parse_A("U2sq"))
  for x in (-3.0, -1.2, 0.0, 0.7, 1.99, 2.0, 4.0):
    assert density(x) == pytest.approx(0.0, abs=1e-14)


def test_outside_density_integrates_to_F(q0_operator):
  one = parse_A("one")
  density = lambda_density(spectral_data(q0_operator), one)
  top = 13.0 / 6.0
  inside, _ = integrate.quad(density, 2.0, top, epsabs=1e-13)
  beyond, _ = integrate.quad(density, top + 1e-9, 6.0)
  assert inside == pytest.approx(F_of(one, top), abs=1e-10)
  assert beyond == 0.0


def test_free_sides_vanish(free_operator):
  sd = spectral_data(free_operator)
  for spec in WEIGHTS:
    a = parse_A(spec)
    assert Lambda_A(sd, a) == pytest.approx(0.0, abs=1e-13)
    assert H_A(free_operator, a) == pytest.approx(0.0, abs=1e-13)
    assert h_A_at(free_operator, a, 3) == pytest.approx(0.0, abs=1e-13)


def test_rank_one_lambda(q0_operator):
  sd = spectral_data(q0_operator)
  one = parse_A("one")
  assert Lambda_A(sd, one) == pytest.approx(1.125, abs=1e-6)
  assert Lambda_A(sd, one, nodes=4000) == pytest.approx(Lambda_A(sd, one),
                                                        abs=1e-8)


def test_lambda_rejects_negative_weight(q0_operator):
  sd = spectral_data(q0_operator)
  with pytest.raises(ValidationError):
    Lambda_A(sd, parse_A("1,-1"))


def test_killip_simon_examples(q0_operator):
  one = parse_A("one")
  assert H_via_trace(q0_operator, one) == pytest.approx(1.125, abs=1e-14)
  assert killip_simon_H(q0_operator) == pytest.approx(1.125)
  p1 = JacobiOperator(p={1: 1.2})
  expected = 1.44 - 1.0 - math.log(1.44)
  assert killip_simon_H(p1) == pytest.approx(expected, abs=1e-14)
  assert H_via_trace(p1, one) == pytest.approx(expected, abs=1e-12)
  assert killip_simon_H(JacobiOperator.free()) == 0.0


def test_h_terms_vanish_beyond_rank(rank3_operator):
  a = parse_A("U1pU2sq")
  start = rank3_operator.rank + a.degree + 2
  for k in range(start, start + 4):
    assert h_A_at(rank3_operator, a, k) == pytest.approx(0.0, abs=1e-12)


def test_h_shift_consistency():
  J = random_operator(np.random.default_rng(3), 5)
  a = parse_A("U2sq")
  for k in range(1, 5):
    assert h_A_at(J, a, k) == pytest.approx(h_A_at(shift(J, k), a, 0),
                                            abs=1e-12)


def test_h_rejects_bad_arguments(rank3_operator, whole_line_operator):
  with pytest.raises(ValidationError):
    h_A_at(rank3_operator, parse_A("one"), -1)
  with pytest.raises(ValidationError):
    h_A_at(whole_line_operator, parse_A("one"), 0)


def test_partial_sums_settle(rank3_operator):
  a = parse_A("U2sq")
  sums = H_A_partial_sums(rank3_operator, a, 20)
  assert len(sums) == 20
  assert sums[-1] == pytest.approx(H_A(rank3_operator, a), abs=1e-13)
  assert H_A(rank3_operator, a, N=12) == pytest.approx(H_A(rank3_operator, a),
                                                       abs=1e-13)
  with pytest.raises(ValidationError):
    H_A(rank3_operator, a, N=-1)


def test_two_routes_agree(half_line_ensemble):
  for J in half_line_ensemble:
    for spec in WEIGHTS:
      a = parse_A(spec)
      h = H_A(J, a)
      assert H_via_trace(J, a) == pytest.approx(h, abs=1e-10 * (1 + abs(h)))


def test_sides_are_linear_in_A(rank3_operator):
  sd = spectral_data(rank3_operator)
  a = parse_A("U1pU2sq")
  double = a.scale(2.0)
  assert Lambda_A(sd, double) == pytest.approx(2.0 * Lambda_A(sd, a),
                                               rel=1e-10)
  assert H_A(rank3_operator, double) == pytest.approx(
    2.0 * H_A(rank3_operator, a), rel=1e-10)


def test_whole_line_H_is_killip_simon(whole_line_operator, p_perturbation):
  one = parse_A("one")
  for J in (whole_line_operator, p_perturbation):
    assert H_whole_line(J, one) == pytest.approx(killip_simon_H(J),
                                                 rel=1e-12)
  with pytest.raises(ValidationError):
    H_whole_line(JacobiOperator.free(), one)


def test_verify_rank_one(q0_operator):
  report = verify_sum_rule(q0_operator, parse_A("one"), case_id="q0=1.5")
  assert report.passed
  assert report.eigenvalues == pytest.approx([13.0 / 6.0])
  assert report.h_value == pytest.approx(1.125, abs=1e-12)
  assert report.eigen_term == pytest.approx(F_of(parse_A("one"), 13.0 / 6.0))
  assert report.ks_constant_residual == pytest.approx(0.5, abs=1e-6)


def test_verify_free(free_operator):
  report = verify_sum_rule(free_operator, parse_A("U2sq"))
  assert report.passed
  assert report.residual == pytest.approx(0.0, abs=1e-13)
  assert report.ks_constant_residual is None


def test_verify_random_rank_six():
  J = random_operator(np.random.default_rng(2024), 6)
  report = verify_sum_rule(J, parse_A("U1pU2sq"), a_spec="U1pU2sq")
  assert report.passed
  assert report.a_spec == "U1pU2sq"
  assert report.eigen_term >= 0.0


@pytest.mark.parametrize("spec", ["one", "U2sq", "U3sq", "U1pU2sq"])
def test_verify_ensemble(half_line_ensemble, spec):
  a = parse_A(spec)
  for J in half_line_ensemble:
    report = verify_sum_rule(J, a, 2000)
    assert report.residual <= 1e-6 * (1.0 + abs(report.lambda_value))
    assert report.passed, report.json()


def test_log_integral_of_free_is_zero(free_operator):
  sd = spectral_data(free_operator)
  assert log_integral_term(sd, parse_A("U1pU2sq")) == pytest.approx(
    0.0, abs=1e-13)
  assert eigen_term(sd, parse_A("one")) == 0.0
