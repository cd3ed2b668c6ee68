"""Symbolic trace engine and the closed-form lemmas."""

import math
from fractions import Fraction

import pytest

from voatrace.fock import BracketMonomial, bracket_to_round, brute_force_Z, enum_basis
from voatrace.modforms import E2, E4, E6, QuasiModular, eta_power, qm_to_series, reduce_e2k
from voatrace.zhu import (
    PairingPolynomial,
    closed_form_lemma1,
    closed_form_lemma2,
    double_factorial,
    reduce_boson_trace,
    reduce_pairing_trace,
)


def a(*modes, rank=1, direction=1):
    return BracketMonomial([(direction, n) for n in modes], rank)


class TestReduceBosonTrace:
    def test_vacuum(self):
        r = reduce_boson_trace(BracketMonomial.vacuum(2))
        assert r.f == QuasiModular.constant(1)
        assert r.series(5) == eta_power(-2, 5)

    def test_a1_fourth(self):
        assert reduce_boson_trace(a(1, 1, 1, 1)).f == E2 * E2 * 3

    def test_a2_squared(self):
        assert reduce_boson_trace(a(2, 2)).f == E4 * -6

    def test_a3_squared(self):
        assert reduce_boson_trace(a(3, 3)).f == E6 * 30

    def test_orthogonal_directions(self):
        m = BracketMonomial([(1, 1), (2, 1)], 2)
        assert reduce_boson_trace(m).f.is_zero()
        m = BracketMonomial([(1, 1), (1, 1), (2, 1), (2, 1)], 2)
        assert reduce_boson_trace(m).f == E2 * E2

    @pytest.mark.parametrize("w", [1, 3, 5, 7])
    def test_odd_weight_vanishes(self, w):
        for s in enum_basis(2, w):
            assert reduce_boson_trace(BracketMonomial(s, 2)).f.is_zero()

    def test_weight_bound(self):
        for w in range(7):
            for s in enum_basis(2, w):
                f = reduce_boson_trace(BracketMonomial(s, 2)).f
                assert all(x <= w for x in f.weights())

    def test_against_brute_force_weight_four(self):
        T = Fraction(6) - Fraction(1, 24)
        for s in enum_basis(1, 4):
            m = BracketMonomial(s, 1)
            assert reduce_boson_trace(m).series(T) == brute_force_Z(bracket_to_round(m), T)


class TestPairingTrace:
    def test_generic_momentum(self):
        # a[-1]^2 on M(1) (x) e^alpha: (a, alpha)^2 + E2
        p = reduce_pairing_trace(a(1, 1))
        assert p == PairingPolynomial(1, {(2,): QuasiModular.constant(1), (0,): E2})

    def test_single(self):
        p = reduce_pairing_trace(a(1))
        assert p == PairingPolynomial(1, {(1,): QuasiModular.constant(1)})

    def test_zero_momentum_recovers_boson(self):
        for s in enum_basis(2, 4):
            m = BracketMonomial(s, 2)
            assert reduce_pairing_trace(m).constant_part() == reduce_boson_trace(m).f

    def test_degree_bound(self):
        for s in enum_basis(2, 5):
            m = BracketMonomial(s, 2)
            assert reduce_pairing_trace(m).degree() <= m.weight


class TestClosedForms:
    def test_double_factorial(self):
        assert [double_factorial(n) for n in (-1, 1, 3, 5, 7)] == [1, 1, 3, 15, 105]

    def test_lemma1_examples(self):
        assert closed_form_lemma1(1, 1) == E2
        assert closed_form_lemma1(2, 1) == E4 * -6
        assert closed_form_lemma1(1, 0) == QuasiModular.constant(1)

    def test_lemma2_examples(self):
        assert closed_form_lemma2(1, 1, 12) == E2 * E4 * -6
        assert closed_form_lemma2(0, 2, 12) == E4 * E4 * 108
        assert closed_form_lemma2(0, 0, 23) == QuasiModular.constant(1)

    def test_lemma1_rewrites_higher_eisenstein(self):
        assert closed_form_lemma1(4, 1) == reduce_e2k(8) * (-4 * math.comb(7, 3))

    @pytest.mark.parametrize("n", range(1, 5))
    @pytest.mark.parametrize("r", range(0, 4))
    def test_lemma1_agreement(self, n, r):
        assert reduce_boson_trace(a(*([n] * (2 * r)))).f == closed_form_lemma1(n, r)

    @pytest.mark.parametrize("r", range(0, 4))
    @pytest.mark.parametrize("s", range(0, 4))
    def test_lemma2_agreement(self, r, s):
        assert reduce_boson_trace(a(*([1] * (2 * r) + [2] * (2 * s)))).f == closed_form_lemma2(r, s, 12)
        assert reduce_boson_trace(a(*([2] * (2 * r) + [3] * (2 * s)))).f == closed_form_lemma2(r, s, 23)

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            closed_form_lemma2(1, 1, 13)


class TestThreeModeStructure:
    @pytest.mark.parametrize("r", range(3))
    @pytest.mark.parametrize("s", range(3))
    @pytest.mark.parametrize("t", range(3))
    def test_structure(self, r, s, t):
        f = reduce_boson_trace(a(*([1] * (2 * r) + [2] * (2 * s) + [3] * (2 * t)))).f
        assert f.coefficient(r, s, t) != 0
        for key in f.terms:
            if key != (r, s, t):
                assert key[0] < r
        assert f.weights() == {2 * r + 4 * s + 6 * t}

    def test_example(self):
        f = reduce_boson_trace(a(1, 1, 2, 2, 3, 3)).f
        assert f == E2 * E4 * E6 * -180 + E4**3 * -108
