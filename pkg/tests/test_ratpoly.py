import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsdop import (
    CirclePoint,
    EvaluationError,
    RationalPoly,
    SamplingConfig,
    sup_norm_on_circle,
)

F = Fraction


def P(*coeffs):
    return RationalPoly(coeffs)


class TestArithmetic:
    def test_add_cancellation(self):
        assert P(1, 1) + P(0, -1) == P(1)

    def test_add_identity(self):
        p = P(F(2, 3), 0, 5)
        assert RationalPoly.zero() + p == p

    def test_add_hand_case(self):
        assert P(0, F(1, 2), 1) + P(0, F(1, 2)) == P(0, 1, 1)

    def test_scale_identity(self):
        p = P(0, 0, 1)
        assert p.scale(1) == p

    def test_scale_annihilation(self):
        assert P(1, 1).scale(0) == RationalPoly.zero()

    def test_scale_hand_case(self):
        assert P(0, 4, 2).scale(F(1, 2)) == P(0, 2, 1)

    def test_mul_monomial(self):
        assert RationalPoly.monomial(1) * P(1, 1) == P(0, 1, 1)

    def test_mul_identity(self):
        p = P(3, 0, F(7, 2))
        assert p * RationalPoly.one() == p

    def test_mul_binomial_square(self):
        assert P(1, 1) ** 2 == P(1, 2, 1)

    def test_derivative_power_rule(self):
        assert RationalPoly.monomial(3).derivative() == P(0, 0, 3)

    def test_derivative_constant(self):
        assert P(42).derivative() == RationalPoly.zero()

    def test_derivative_hand_case(self):
        # 11/10 z^2 + 1/5 z differentiates to 11/5 z + 1/5
        assert P(0, F(1, 5), F(11, 10)).derivative() == P(F(1, 5), F(11, 5))

    def test_zero_degree_convention(self):
        assert RationalPoly.zero().degree == -1
        assert P(0, 0).degree == -1
        assert P(5).degree == 0

    def test_trailing_zeros_normalized(self):
        assert P(1, 2, 0, 0) == P(1, 2)
        assert P(1, 2, 0, 0).degree == 1


class TestEvaluation:
    def test_eval_i_squared(self):
        assert RationalPoly.monomial(2)(1j) == pytest.approx(-1)

    def test_eval_at_zero(self):
        assert P(1, 1)(0) == pytest.approx(1)

    def test_eval_moment_poly_spot(self):
        value = P(0, F(1, 5), F(11, 10))(1.0)
        assert value == pytest.approx(1.3, rel=1e-15)

    def test_eval_array(self):
        p = P(1, 0, 1)
        zs = np.array([0j, 1j, 1.0 + 0j])
        np.testing.assert_allclose(p(zs), [1, 0, 2], atol=1e-15)

    def test_eval_exact(self):
        p = P(F(1, 3), F(1, 7))
        assert p.eval_exact(F(7, 2)) == F(1, 3) + F(1, 2)

    def test_eval_extended_beats_double_on_cancellation(self):
        # (z - 1)^30 expanded: catastrophic cancellation near z = 1.
        p = P(-1, 1) ** 30
        x = F(1001, 1000)
        exact = p.eval_exact(x)
        assert exact == F(1, 1000) ** 30
        extended = p.eval_extended(x, bits=512)
        assert abs(extended - float(exact)) <= 1e-16 * float(exact)
        plain = p(float(x))
        assert abs(plain - float(exact)) > 1e3 * float(exact)

    def test_dump_format(self):
        assert P(F(1, 2), 0, 3).dump() == "0:1/2\n1:0/1\n2:3/1"

    def test_str(self):
        assert str(P(0, F(1, 5), F(11, 10))) == "11/10 z^2 + 1/5 z"
        assert str(RationalPoly.zero()) == "0"
        assert str(P(0, 1)) == "z"
        assert str(P(-1, 0, 1)) == "z^2 - 1"


class TestSupNorm:
    def test_monomial_on_circle(self):
        result = sup_norm_on_circle(RationalPoly.monomial(3), 2.0)
        assert result.value == pytest.approx(8.0, rel=1e-12)

    def test_constant(self):
        result = sup_norm_on_circle(lambda z: 5.0, 1.0)
        assert result.value == pytest.approx(5.0)

    def test_limit_object(self):
        # z(z+2)exp(z/2)/8 peaks at z=1 (all Taylor coefficients positive),
        # where its value is 3 sqrt(e) / 8.
        def g(z):
            return z * (z + 2) * np.exp(z / 2) / 8

        result = sup_norm_on_circle(g, 1.0)
        assert result.value == pytest.approx(0.6182704765125481, rel=1e-12)
        assert abs(result.peak.angle) < 1e-12

    def test_zero_function(self):
        assert sup_norm_on_circle(RationalPoly.zero(), 1.0).value == 0.0

    def test_pointwise_fallback(self):
        def scalar_only(z):
            return complex(z) ** 2  # rejects arrays

        result = sup_norm_on_circle(scalar_only, 1.5)
        assert result.value == pytest.approx(2.25, rel=1e-12)

    def test_nonfinite_raises(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            with pytest.raises(EvaluationError):
                sup_norm_on_circle(lambda z: 1.0 / (z - z), 1.0)

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            sup_norm_on_circle(RationalPoly.one(), 0.0)

    def test_reports_samples_and_history(self):
        result = sup_norm_on_circle(P(1, -1, 0, 1), 1.0)
        assert result.samples >= 1024
        assert len(result.history) >= 2
        assert result.converged

    def test_circle_point_modulus(self):
        point = CirclePoint(2.5, 1.234)
        assert abs(point.value) == pytest.approx(2.5, rel=1e-15)


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=12)
small_polys = st.lists(rationals, min_size=0, max_size=8).map(RationalPoly)
points = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


class TestProperties:
    @given(small_polys, small_polys, points)
    def test_eval_is_additive(self, p, q, z):
        total = (p + q)(z)
        assert cmath.isclose(total, p(z) + q(z), rel_tol=1e-9, abs_tol=1e-9)

    @given(small_polys, small_polys)
    def test_product_degree(self, p, q):
        if p.is_zero() or q.is_zero():
            assert (p * q).is_zero()
        else:
            assert (p * q).degree == p.degree + q.degree

    @settings(max_examples=25, deadline=None)
    @given(small_polys, st.sampled_from([1.0, 1.5, 2.0]))
    def test_bernstein_inequality(self, p, r):
        if p.degree < 1:
            return
        k = p.degree
        cfg = SamplingConfig(rel_tol=1e-7)
        lhs = sup_norm_on_circle(p.derivative(), r, cfg).value
        rhs = sup_norm_on_circle(p, r, cfg).value
        assert lhs <= (k / r) * rhs * (1 + 1e-6) + 1e-12

    @settings(max_examples=25, deadline=None)
    @given(small_polys, st.sampled_from([(1.0, 1.5), (1.0, 2.0), (1.5, 2.0)]))
    def test_sup_norm_monotone_in_radius(self, p, radii):
        r_small, r_big = radii
        cfg = SamplingConfig(rel_tol=1e-7)
        small = sup_norm_on_circle(p, r_small, cfg).value
        big = sup_norm_on_circle(p, r_big, cfg).value
        assert small <= big * (1 + 1e-6) + 1e-12

    def test_refinement_convergence(self):
        cfg = SamplingConfig(rel_tol=1e-6)
        result = sup_norm_on_circle(P(1, -1, 0, 1), 1.0, cfg)
        assert result.converged
        a, b = result.history[-2], result.history[-1]
        assert abs(a - b) <= 1e-6 * max(a, b)
