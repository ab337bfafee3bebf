import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from curvepoisson.exactcomb import (
    Ball,
    MomentVector,
    TruncatedSeries,
    exp_ball,
    falling_from_raw,
    graded_dimensions,
    hilbert_series,
    hilbert_series_from_factors,
    hs_ratio_closed_form,
    lambda_of_q,
    multiset_series,
    partition_numbers,
    partition_series,
    poisson_moment_by_summation,
    poisson_pmf,
    poisson_pmf_table,
    predicted_falling_moment,
    predicted_moment,
    raw_from_falling,
    stirling1,
    stirling2,
    truncated_hs_ratio,
)

from oracles import (
    falling_factorial_coefficients,
    multisets,
    partition_count_dp,
    partitions,
    stirling2_brute,
    tautological_monomials,
)


class TestPartitions:
    def test_small_values(self):
        assert partition_numbers(0) == [1]
        assert partition_numbers(4)[4] == 5
        assert partition_numbers(10)[10] == 42

    def test_against_enumeration(self):
        p = partition_numbers(18)
        assert p == [sum(1 for _ in partitions(n)) for n in range(19)]

    def test_against_coin_change_dp(self):
        assert partition_numbers(600) == partition_count_dp(600)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            partition_numbers(-1)


class TestMultisets:
    def test_examples(self):
        assert list(multiset_series(1, 7).coefficients) == [1] * 8
        assert multiset_series(2, 5)[3] == 4
        assert multiset_series(3, 5)[2] == 6
        assert list(multiset_series(0, 3).coefficients) == [1, 0, 0, 0]

    @given(st.integers(1, 4), st.integers(0, 6))
    def test_against_enumeration(self, n, j):
        assert multiset_series(n, 6)[j] == multisets(n, j)


class TestTruncatedSeries:
    def test_length_and_order(self):
        s = partition_series(7)
        assert len(s) == 8 and s.truncation_order == 7

    def test_product_truncates(self):
        a = TruncatedSeries((1, 1, 0))
        b = TruncatedSeries((1, 1, 0, 5))
        assert (a * b).coefficients == (1, 2, 1)

    def test_coefficients_are_fractions(self):
        assert all(isinstance(c, Fraction) for c in partition_series(3).coefficients)

    def test_out_of_range_degree(self):
        with pytest.raises(IndexError):
            partition_series(3)[4]


class TestHilbertSeries:
    def test_examples(self):
        hs0 = hilbert_series(0, 5)
        assert hs0[0] == 1 and hs0[8] == 5
        assert hilbert_series(1, 3)[2] == 2

    def test_unmarked_dims_are_partition_numbers(self):
        assert list(graded_dimensions(0, 300)) == partition_numbers(300)

    @pytest.mark.parametrize("n", range(0, 4))
    def test_dimensions_count_monomials(self, n):
        dims = graded_dimensions(n, 12)
        assert [tautological_monomials(n, i) for i in range(13)] == list(dims)

    @given(st.integers(0, 8), st.integers(0, 60))
    def test_odd_coefficients_vanish(self, n, D):
        assert hilbert_series(n, D).odd_coefficients_vanish()

    @given(st.integers(0, 8), st.integers(0, 80))
    def test_factorization(self, n, D):
        assert hilbert_series(n, D) == hilbert_series_from_factors(n, D)

    @given(st.integers(1, 6), st.integers(0, 40))
    def test_adding_a_point_is_prefix_sum(self, n, D):
        prev, cur = graded_dimensions(n - 1, D), graded_dimensions(n, D)
        assert all(cur[i] == sum(prev[: i + 1]) for i in range(D + 1))


class TestLambda:
    def test_values(self):
        assert lambda_of_q(2) == 4
        assert lambda_of_q(3) == Fraction(9, 2)
        assert lambda_of_q(4) == Fraction(16, 3)

    @given(st.integers(2, 10**6))
    def test_closed_form(self, q):
        assert lambda_of_q(q) == Fraction(q * q, q - 1)

    @pytest.mark.parametrize("bad", [1, 0, -3])
    def test_small_q_rejected(self, bad):
        with pytest.raises(ValueError):
            lambda_of_q(bad)

    def test_non_integer_rejected(self):
        with pytest.raises(TypeError):
            lambda_of_q(2.0)


class TestStirling:
    def test_examples(self):
        assert stirling2(3, 2) == 3
        assert stirling2(4, 2) == 7
        assert all(stirling2(n, n) == 1 for n in range(1, 12))

    @pytest.mark.parametrize("n", range(1, 8))
    def test_against_set_partitions(self, n):
        assert [stirling2(n, k) for k in range(1, n + 1)] == [
            stirling2_brute(n, k) for k in range(1, n + 1)
        ]

    @pytest.mark.parametrize("n,k", [(3, 4), (3, 0), (0, 0)])
    def test_out_of_range(self, n, k):
        with pytest.raises(ValueError):
            stirling2(n, k)

    @pytest.mark.parametrize("n", range(0, 10))
    def test_first_kind_expands_falling_factorial(self, n):
        assert [stirling1(n, k) for k in range(n + 1)] == falling_factorial_coefficients(n)

    @given(st.integers(1, 25))
    def test_bell_numbers_row_sum(self, n):
        # sum_k {n k} = Bell(n), and Bell numbers satisfy B(n+1) = sum C(n,k) B(k)
        bell = [1]
        for m in range(n):
            bell.append(sum(math.comb(m, k) * bell[k] for k in range(m + 1)))
        assert sum(stirling2(n, k) for k in range(1, n + 1)) == bell[n]


class TestMoments:
    def test_examples(self):
        assert predicted_moment(1, 2) == 4
        assert predicted_moment(2, 2) == 20
        assert predicted_moment(3, 2) == 116
        assert predicted_falling_moment(1, 2) == 4
        assert predicted_falling_moment(2, 3) == Fraction(81, 4)
        assert predicted_falling_moment(0, 5) == 1

    def test_moment_order_must_be_positive(self):
        with pytest.raises(ValueError):
            predicted_moment(0, 2)

    @given(st.integers(2, 50), st.integers(1, 10))
    def test_change_of_basis(self, q, n_max):
        raw = [predicted_moment(n, q) for n in range(1, n_max + 1)]
        falling = [predicted_falling_moment(n, q) for n in range(1, n_max + 1)]
        assert falling_from_raw(raw) == falling
        assert raw_from_falling(falling) == raw

    @given(st.lists(st.fractions(), min_size=1, max_size=8))
    def test_basis_change_round_trip(self, values):
        assert raw_from_falling(falling_from_raw(values)) == values

    def test_raw_moments_by_summation_oracle(self):
        lam = mpmath.mpf(4)
        for n in range(1, 7):
            with mpmath.workdps(40):
                ref = mpmath.nsum(lambda k: k**n * lam**k / mpmath.factorial(k), [0, mpmath.inf])
                ref *= mpmath.exp(-lam)
            assert abs(float(predicted_moment(n, 2)) - float(ref)) < 1e-9 * float(ref)


class TestRatio:
    def test_examples(self):
        assert hs_ratio_closed_form(0, 7) == 1
        assert hs_ratio_closed_form(1, 2) == 4
        assert hs_ratio_closed_form(2, 3) == Fraction(81, 4)

    @given(st.integers(0, 12), st.integers(2, 40))
    def test_equals_lambda_power(self, n, q):
        assert hs_ratio_closed_form(n, q) == lambda_of_q(q) ** n

    def test_truncated_ratio_converges(self):
        gaps = [abs(truncated_hs_ratio(3, 2, D) - 64) for D in (20, 40, 80, 160)]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < Fraction(1, 10**6)


def mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


class TestBalls:
    def test_exp_matches_mpmath(self):
        for x in (Fraction(-4), Fraction(1, 3), Fraction(-9, 2), Fraction(7)):
            b = exp_ball(x, 40)
            with mpmath.workdps(60):
                ref = mpmath.exp(mpmath.mpf(x.numerator) / x.denominator)
                assert abs(mp(b.center) - ref) <= mp(b.radius) * 1.0000001
            assert b.radius < Fraction(1, 10**40) * max(1, abs(b.center))

    def test_pmf_zero(self):
        b = poisson_pmf(0, 4, 50)
        with mpmath.workdps(60):
            ref = mpmath.exp(-4)
            assert abs(mp(b.center) - ref) <= mp(b.radius)
        assert b.to_decimal(7).startswith("0.0183156")
        assert b.radius < Fraction(1, 10**50)

    def test_pmf_mode_at_floor_lambda(self):
        table = poisson_pmf_table(Fraction(4), 30, 30)
        values = [float(b) for b in table]
        assert max(range(31), key=values.__getitem__) in (3, 4)
        # lambda = 4 is an integer, so p(3) = p(4) exactly; the mode set is {3, 4}
        assert abs(values[3] - values[4]) < 1e-25

    def test_pmf_normalisation(self):
        table = poisson_pmf_table(Fraction(4), 200, 60)
        total = Ball(Fraction(0), Fraction(0))
        for b in table:
            total = total + b
        assert abs(total.center - 1) <= total.radius + Fraction(1, 10**50)

    def test_precision_must_be_positive(self):
        with pytest.raises(ValueError):
            poisson_pmf(1, 4, 0)

    def test_lambda_must_be_positive(self):
        with pytest.raises(ValueError):
            poisson_pmf(1, 0)

    @given(st.integers(0, 40), st.fractions(min_value=Fraction(1, 10), max_value=20))
    def test_pmf_contains_mpmath_value(self, n, lam):
        b = poisson_pmf(n, lam, 30)
        with mpmath.workdps(60):
            l = mp(lam)
            ref = l**n * mpmath.exp(-l) / mpmath.factorial(n)
            assert abs(mp(b.center) - ref) <= mp(b.radius) * 1.000001

    @pytest.mark.parametrize("falling", [False, True])
    def test_moment_summation_contains_exact(self, falling):
        for n in range(1, 7):
            exact = predicted_falling_moment(n, 2) if falling else predicted_moment(n, 2)
            b = poisson_moment_by_summation(n, Fraction(4), 50, falling=falling)
            assert b.contains(exact)
            assert b.radius <= Fraction(1, 10**20)


class TestMomentVector:
    def test_contiguous_keys_required(self):
        with pytest.raises(ValueError):
            MomentVector({1: Fraction(1), 3: Fraction(2)})

    def test_order_zero_is_one(self):
        m = MomentVector({1: Fraction(3)})
        assert m[0] == 1 and m.n_max == 1 and m.as_list() == [3]
