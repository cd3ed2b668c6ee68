"""Exact truncated q-series arithmetic."""

import cmath
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voatrace.modforms import eisenstein, eta_power
from voatrace.qseries import (
    GaussianRational,
    NonInvertible,
    NotUpperHalfPlane,
    QSeries,
    add,
    eval_at_tau,
    format_rational,
    mul,
    parse_gaussian,
    parse_rational,
    series_pow,
)


def q(*coeffs, T=None, offset=0):
    """Series with integer exponents offset, offset+1, ..."""
    T = len(coeffs) + offset if T is None else T
    return QSeries({offset + i: c for i, c in enumerate(coeffs)}, T)


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
small_series = st.builds(
    lambda cs, T: QSeries({i: c for i, c in enumerate(cs)}, T),
    st.lists(fractions, min_size=0, max_size=6),
    st.integers(min_value=1, max_value=7),
)


class TestGaussianRational:
    def test_lowest_terms(self):
        z = GaussianRational(Fraction(2, 4), Fraction(-3, 9))
        assert z.re == Fraction(1, 2) and z.im == Fraction(-1, 3)

    def test_field_ops(self):
        i = GaussianRational(0, 1)
        assert i * i == -1
        z = GaussianRational(3, 4)
        assert z * (1 / z) == 1
        assert z * z.conjugate() == 25

    def test_parse_and_record(self):
        for text in ["3/4", "-1/2 + 2/3*i", "i", "-i", "5*i"]:
            z = parse_gaussian(text)
            rec = z.to_record()
            assert GaussianRational(parse_rational(rec["re"]), parse_rational(rec["im"])) == z
        assert parse_gaussian("1 + i") == GaussianRational(1, 1)

    def test_rational_format(self):
        assert format_rational(Fraction(3)) == "3/1"
        assert format_rational(Fraction(-6, 4)) == "-3/2"
        assert parse_rational("-3/2") == Fraction(-3, 2)


class TestCanonicalForm:
    def test_drops_zeros_and_clips(self):
        s = QSeries({0: 1, 1: 0, 2: 3, 5: 7}, 4)
        assert list(s.terms) == [0, 2]
        assert s.truncation == 4

    def test_equality_at_common_truncation(self):
        a = q(1, 2, 3)
        b = q(1, 2, 3, 4)
        assert a == b
        assert not a.identical(b)
        assert q(1, 2, 4) != q(1, 2, 3)


class TestAdd:
    def test_coefficientwise(self):
        assert add(q(1, 2, 0, T=4), q(0, 3, 1, T=4)) == q(1, 5, 1, T=4)

    def test_fractional_exponents(self):
        e = Fraction(-1, 24)
        a = QSeries.monomial(e, 1, 3)
        b = QSeries.monomial(e + 1, 1, 3)
        s = a + b
        assert s.terms == {e: 1, e + 1: 1}

    def test_e2_plus_constant(self):
        s = eisenstein(2, 5) + QSeries.constant(Fraction(1, 12), 5)
        assert s == q(0, 2, 6, 8, 14)

    def test_truncation_is_min(self):
        assert add(q(1, T=3), q(1, T=7)).truncation == 3


class TestMul:
    def test_geometric_inverse(self):
        geo = q(*([1] * 10))
        assert mul(q(1, -1, T=10), geo) == QSeries.constant(1, 10)

    def test_eta_inverse(self):
        T = 12
        assert eta_power(1, T) * eta_power(-1, T) == QSeries.constant(1, T)

    def test_truncation_rule(self):
        a = QSeries({2: 1}, 5)
        b = QSeries({1: 1}, 4)
        # min(5 + 1, 4 + 2)
        assert (a * b).truncation == 6

    def test_e4_squared(self):
        from voatrace.modforms import qm_to_series, reduce_e2k

        T = 10
        assert eisenstein(4, T) * eisenstein(4, T) == qm_to_series(reduce_e2k(8), T).scale(Fraction(7, 3))


class TestPow:
    def test_reciprocal(self):
        assert series_pow(q(1, -1, T=8), -1) == q(*([1] * 8))

    def test_zero_power(self):
        assert series_pow(q(3, 1, T=5), 0) == QSeries.constant(1, 5)

    def test_eta_24(self):
        # (q^(1/24)(1 - q - q^2 + ...))^24 = q - 24 q^2 + 252 q^3 - ...
        d = series_pow(eta_power(1, 5), 24)
        assert d.coefficient(1) == 1
        assert d.coefficient(2) == -24
        assert d.coefficient(3) == 252
        assert d.coefficient(4) == -1472

    def test_non_invertible(self):
        with pytest.raises(NonInvertible):
            series_pow(QSeries.zero(5), -1)


class TestEval:
    def test_monomial_at_i(self):
        assert abs(eval_at_tau(QSeries({1: 1}, 2), 1j) - math.exp(-2 * math.pi)) < 1e-15

    def test_eta_at_i(self):
        assert abs(eval_at_tau(eta_power(1, 60), 1j) - 0.768225) < 1e-6

    def test_lower_half_plane(self):
        with pytest.raises(NotUpperHalfPlane):
            eval_at_tau(q(1), -1j)
        with pytest.raises(NotUpperHalfPlane):
            eval_at_tau(q(1), 0.5)

    def test_fractional_exponent_uses_principal_branch(self):
        s = QSeries({Fraction(1, 24): 1}, 1)
        tau = 0.25 + 1j
        assert abs(eval_at_tau(s, tau) - cmath.exp(2j * math.pi * tau / 24)) < 1e-15


class TestRingProperties:
    @given(small_series, small_series, small_series)
    @settings(max_examples=60, deadline=None)
    def test_associative_and_commutative(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)

    @given(small_series, small_series, small_series)
    @settings(max_examples=60, deadline=None)
    def test_distributive(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(small_series, st.integers(min_value=1, max_value=4))
    @settings(max_examples=60, deadline=None)
    def test_pow_inverse(self, a, k):
        if a.is_zero():
            return
        inv = series_pow(a, -k)
        prod = series_pow(a, k) * inv
        assert prod == QSeries.constant(1, prod.truncation)

    @given(small_series, st.fractions(min_value=-2, max_value=2, max_denominator=24))
    @settings(max_examples=60, deadline=None)
    def test_serialization_round_trip(self, a, shift):
        a = a.shift(shift)
        text = json.dumps(a.to_records(), sort_keys=True)
        back = QSeries.from_records(json.loads(text))
        assert back.identical(a)
