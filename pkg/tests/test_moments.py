import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsdop import (
    BasisFunction,
    HypothesisError,
    MomentTable,
    RationalPoly,
    basis_identity_holds,
    moment_error_bound,
    moment_integral,
    moment_poly,
    moment_poly_from_series,
    moment_table,
    remainder_bound_coefficient,
    remainder_recurrence_defect,
    remainder_sup_bound,
    sup_norm_on_circle,
    tail_decay_inequality_holds,
    voronovskaja_remainder,
)

F = Fraction


class TestMomentIntegral:
    def test_gamma_case(self):
        # integral of exp(-2t) t^2 dt = 2/8
        assert moment_integral(2, 1, 2) == F(1, 4)

    @pytest.mark.parametrize("n", [1, 2, 7])
    @pytest.mark.parametrize("v", [1, 3, 10])
    def test_normalization(self, n, v):
        assert moment_integral(n, v, 0) == F(1, n)

    def test_rising_factorial_case(self):
        assert moment_integral(1, 2, 1) == 2

    def test_invalid_v(self):
        with pytest.raises(ValueError):
            moment_integral(3, 0, 1)

    @settings(max_examples=40)
    @given(
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=1, max_value=12),
        st.integers(min_value=0, max_value=6),
    )
    def test_matches_quadrature(self, n, v, k):
        # independent check against mpmath numerical quadrature
        import mpmath

        def integrand(t):
            return mpmath.e ** (-n * t) * (n * t) ** (v - 1) / mpmath.factorial(v - 1) * t**k

        numeric = mpmath.quad(integrand, [0, mpmath.inf])
        assert abs(numeric - float(moment_integral(n, v, k))) <= 1e-10 * max(
            1.0, float(moment_integral(n, v, k))
        )


class TestBasisIdentity:
    def test_hand_case(self):
        # b(1,1) = z/(1+z)^2; both sides reduce to z(1-z)/(1+z)^2
        assert basis_identity_holds(1, 1)

    @pytest.mark.parametrize("n,v", [(3, 2), (5, 7), (10, 10), (1, 10), (10, 1)])
    def test_symbolic_expansion(self, n, v):
        assert basis_identity_holds(n, v)

    def test_basis_value(self):
        b = BasisFunction(1, 1)
        assert b.numerator == RationalPoly((0, 1))
        assert b.denominator_exponent == 2
        assert b.value_at(1) == F(1, 4)

    def test_partition_of_unity_numerically(self):
        # sum_v b(n,v)(x) + (1+x)^{-n} telescopes to 1
        n, x = 4, F(3, 2)
        total = sum(BasisFunction(n, v).value_at(x) for v in range(1, 400))
        total += F(1) / (1 + x) ** n
        assert abs(float(total - 1)) < 1e-25


class TestMomentTable:
    def test_constant_and_linear_reproduction(self):
        for n in (1, 3, 10, 100):
            table = moment_table(n, 1)
            assert table.poly(0) == RationalPoly.one()
            assert table.poly(1) == RationalPoly.monomial(1)

    @pytest.mark.parametrize("n", [3, 10, 100])
    def test_quadratic_closed_form(self, n):
        expected = RationalPoly([0, F(2, n), 1 + F(1, n)])
        assert moment_poly(n, 2) == expected

    @pytest.mark.parametrize("n", [3, 10, 100])
    def test_cubic_closed_form(self, n):
        expected = RationalPoly(
            [0, F(6, n**2), F(6 * (n + 1), n**2), F((n + 1) * (n + 2), n**2)]
        )
        assert moment_poly(n, 3) == expected

    @pytest.mark.parametrize("n", [3, 7, 12])
    def test_degree(self, n):
        for k in range(0, 15):
            assert moment_poly(n, k).degree == k

    def test_recurrence_is_satisfied(self):
        z1z = RationalPoly((0, 1, 1))
        for n in (4, 9):
            for k in range(0, 10):
                t, t_next = moment_poly(n, k), moment_poly(n, k + 1)
                rhs = (z1z * t.derivative() + RationalPoly((k, n)) * t).scale(F(1, n))
                assert t_next == rhs

    def test_cap(self):
        with pytest.raises(ValueError):
            moment_table(5, 65)
        moment_table(5, 65, max_k=65)  # explicit raise of the cap

    def test_json_round_trip(self):
        table = moment_table(6, 5)
        clone = MomentTable.from_json(table.to_json())
        assert clone.n == 6
        for k in range(6):
            assert clone.poly(k) == table.poly(k)


class TestOracle:
    def test_linear_reproduction(self):
        result = moment_poly_from_series(4, 1)
        assert result.exact
        assert result.poly == RationalPoly.monomial(1)

    def test_quadratic(self):
        result = moment_poly_from_series(10, 2)
        assert result.exact
        assert result.poly == RationalPoly([0, F(1, 5), F(11, 10)])

    def test_k_zero(self):
        assert moment_poly_from_series(7, 0).poly == RationalPoly.one()

    @pytest.mark.parametrize("n", [3, 6, 10])
    @pytest.mark.parametrize("k", [3, 5, 8])
    def test_agrees_with_recurrence(self, n, k):
        result = moment_poly_from_series(n, k)
        assert result.exact
        assert result.max_error == 0.0
        assert result.poly == moment_poly(n, k)


class TestRemainders:
    @pytest.mark.parametrize("n", [3, 10])
    def test_low_orders_vanish(self, n):
        for k in (0, 1, 2):
            assert voronovskaja_remainder(n, k).remainder.is_zero()
            assert voronovskaja_remainder(n, k).forcing.is_zero()

    @pytest.mark.parametrize("n", [3, 7, 12])
    def test_cubic_closed_form(self, n):
        rem = voronovskaja_remainder(n, 3)
        assert rem.remainder == RationalPoly([0, F(6, n**2), F(6, n**2), F(2, n**2)])
        # X(n,3) = (z/(2 n^2)) (4 z^2 + 12 z + 12), and equals E(n,3)
        expected_forcing = RationalPoly.monomial(1, F(1, 2 * n**2)) * RationalPoly((12, 12, 4))
        assert rem.forcing == expected_forcing
        assert rem.remainder == rem.forcing

    @pytest.mark.parametrize("n", [3, 8, 12])
    def test_forced_recurrence_exact(self, n):
        for k in range(1, 21):
            assert remainder_recurrence_defect(n, k, max_k=64).is_zero()


class TestBounds:
    def test_moment_error_bound_values(self):
        assert moment_error_bound(10, 1, 1.0) == pytest.approx(0.6)
        assert moment_error_bound(10, 2, 1.0) == pytest.approx(1.8)

    def test_moment_error_bound_dominates(self):
        # actual gap for k=2, n=10, r=1 is sup|z(z+2)|/10 = 0.3
        gap = moment_poly(10, 2) - RationalPoly.monomial(2)
        measured = sup_norm_on_circle(gap, 1.0).value
        assert measured == pytest.approx(0.3, rel=1e-12)
        assert measured <= moment_error_bound(10, 2, 1.0)

    def test_linear_case_zero_error(self):
        gap = moment_poly(10, 1) - RationalPoly.monomial(1)
        assert gap.is_zero()

    def test_moment_error_bound_precondition(self):
        with pytest.raises(HypothesisError):
            moment_error_bound(3, 1, 1.0)  # n <= r + 2

    def test_remainder_coefficient_values(self):
        assert remainder_bound_coefficient(2, 1) == 36
        assert remainder_bound_coefficient(3, 1) == 172
        generic = remainder_bound_coefficient(2, F(7, 3))
        assert generic == (F(7, 3) + 1) * (F(7, 3) + 2) * 6

    @pytest.mark.parametrize("k", range(2, 25))
    def test_remainder_coefficient_positive(self, k):
        assert remainder_bound_coefficient(k, 1) > 0
        assert remainder_bound_coefficient(k, 2) > 0

    def test_remainder_sup_bound_dominates(self):
        rem = voronovskaja_remainder(10, 3).remainder
        measured = sup_norm_on_circle(rem, 1.0).value
        assert measured == pytest.approx(14 / 100, rel=1e-12)
        assert measured <= remainder_sup_bound(10, 3, 1.0)

    def test_tail_decay_grid(self):
        for rho in (0.1, 0.5, 0.9):
            for n in range(1, 201):
                assert tail_decay_inequality_holds(rho, n)

    def test_tail_decay_validates(self):
        with pytest.raises(ValueError):
            tail_decay_inequality_holds(1.5, 3)
