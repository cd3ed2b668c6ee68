"""Fock space M(1): basis, mode actions, bracket modes and the brute-force trace."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voatrace.fock import (
    BracketMonomial,
    FockVector,
    NotHomogeneous,
    apply_mode,
    bracket_coeff,
    bracket_to_round,
    brute_force_Z,
    enum_basis,
    make_state,
    round_to_bracket,
    state_weight,
    virasoro_L1,
    zero_mode_trace,
)
from voatrace.modforms import E2, eta_power, qm_to_series
from voatrace.qseries import QSeries


def st_vec(d, parts, c=1):
    return FockVector(d, {make_state(parts): c})


def vac(d=1):
    return FockVector.vacuum(d)


class TestEnumBasis:
    def test_partitions_of_three(self):
        basis = enum_basis(1, 3)
        assert set(basis) == {make_state([(1, 3)]), make_state([(1, 2), (1, 1)]), make_state([(1, 1)] * 3)}

    def test_two_colours(self):
        assert len(enum_basis(2, 2)) == 5

    def test_vacuum(self):
        assert enum_basis(3, 0) == ((),)

    def test_dimensions_match_eta(self):
        e = eta_power(-1, 12).shift(Fraction(1, 24))
        assert [len(enum_basis(1, n)) for n in range(12)] == [e.coefficient(n) for n in range(12)]
        e2 = eta_power(-2, 8).shift(Fraction(2, 24))
        assert [len(enum_basis(2, n)) for n in range(8)] == [e2.coefficient(n) for n in range(8)]

    def test_weights(self):
        for s in enum_basis(2, 5):
            assert state_weight(s) == 5


class TestApplyMode:
    def test_annihilate(self):
        assert apply_mode(1, 1, st_vec(1, [(1, 1)])) == vac()

    def test_orthogonal(self):
        assert apply_mode(1, 1, st_vec(2, [(2, 1)])).is_zero()

    def test_create(self):
        assert apply_mode(1, -2, st_vec(1, [(1, 1)])) == st_vec(1, [(1, 2), (1, 1)])

    def test_zero_mode_kills(self):
        assert apply_mode(1, 0, st_vec(1, [(1, 3)])).is_zero()

    def test_multiplicity(self):
        # h(2) h(-2)^2 1 = 2 * 2 h(-2) 1
        assert apply_mode(1, 2, st_vec(1, [(1, 2), (1, 2)])) == st_vec(1, [(1, 2)], 4)

    @given(
        st.integers(1, 2),
        st.integers(1, 2),
        st.integers(-4, 4),
        st.integers(-4, 4),
        st.integers(0, 5),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=80, deadline=None)
    def test_commutator(self, i, j, m, n, w, rnd):
        basis = enum_basis(2, w)
        v = FockVector(2, {rnd.choice(basis): rnd.randint(1, 5), rnd.choice(basis): rnd.randint(-5, -1)})
        lhs = apply_mode(i, m, apply_mode(j, n, v)) - apply_mode(j, n, apply_mode(i, m, v))
        want = v * m if (m + n == 0 and i == j) else FockVector(2)
        assert lhs == want


class TestBracketCoeff:
    @pytest.mark.parametrize("w", [0, 1, 2, 3])
    @pytest.mark.parametrize("m", [-3, -1, 0, 2])
    def test_diagonal(self, w, m):
        assert bracket_coeff(w, m, m) == 1

    def test_reciprocal_log(self):
        assert bracket_coeff(1, -1, 0) == Fraction(1, 2)
        assert bracket_coeff(1, -1, 1) == Fraction(-1, 12)

    @pytest.mark.parametrize("w", [1, 2, 4])
    def test_binomial(self, w):
        from math import comb

        for i in range(0, 6):
            assert bracket_coeff(w, 0, i) == comb(w - 1, i)


class TestBracketToRound:
    def test_single(self):
        assert bracket_to_round(BracketMonomial([(1, 1)], 1)) == st_vec(1, [(1, 1)])

    def test_square(self):
        want = st_vec(1, [(1, 1), (1, 1)]) + vac() * Fraction(-1, 12)
        assert bracket_to_round(BracketMonomial([(1, 1), (1, 1)], 1)) == want

    def test_weight_two(self):
        assert bracket_to_round(BracketMonomial([(1, 2)], 1)) == st_vec(1, [(1, 2)]) + st_vec(1, [(1, 1)])

    def test_leading_term(self):
        for w in range(6):
            for s in enum_basis(2, w):
                m = BracketMonomial(s, 2)
                v = bracket_to_round(m)
                assert v.terms[make_state(s)] == 1
                assert all(state_weight(t) < w for t in v.terms if t != make_state(s))

    def test_inverse(self):
        for w in range(5):
            for s in enum_basis(2, w):
                m = BracketMonomial(s, 2)
                combo = round_to_bracket(bracket_to_round(m))
                assert combo == {m: 1}


class TestZeroModeTrace:
    def test_identity(self):
        assert zero_mode_trace(vac(), 4) == 5

    @pytest.mark.parametrize("n", range(5))
    def test_weight_one_vanishes(self, n):
        assert zero_mode_trace(st_vec(1, [(1, 1)]), n) == 0

    def test_square(self):
        assert zero_mode_trace(st_vec(1, [(1, 1), (1, 1)]), 3) == 18

    def test_rejects_mixed(self):
        with pytest.raises(NotHomogeneous):
            zero_mode_trace(st_vec(1, [(1, 1)]) + vac(), 2)

    @pytest.mark.parametrize("w", [1, 3, 5])
    def test_odd_bracket_weight_vanishes(self, w):
        for s in enum_basis(1, w):
            v = bracket_to_round(BracketMonomial(s, 1))
            assert brute_force_Z(v, 7) == QSeries.zero(7)

    @pytest.mark.parametrize("w", range(1, 7))
    def test_odd_factor_count_vanishes(self, w):
        for s in enum_basis(1, w):
            if len(s) % 2:
                for n in range(7):
                    assert zero_mode_trace(st_vec(1, s), n) == 0

    def test_odd_round_weight_can_survive(self):
        # o(a(-2)a(-1)1) = sum_m (-m-1) :a(m)a(-m): = -2 L(0), so odd round
        # weight alone does not force vanishing
        v = st_vec(1, [(1, 2), (1, 1)])
        for n in range(7):
            assert zero_mode_trace(v, n) == -2 * n * len(enum_basis(1, n))

    def test_virasoro(self):
        # o(omega) = L(0), so tr on M(1)_n is n dim M(1)_n
        for d in (1, 2):
            omega = FockVector(d, {make_state([(i, 1), (i, 1)]): Fraction(1, 2) for i in range(1, d + 1)})
            for n in range(7):
                assert zero_mode_trace(omega, n) == n * len(enum_basis(d, n))


class TestBruteForceZ:
    def test_vacuum_character(self):
        assert brute_force_Z(vac(), 8) == eta_power(-1, 8)

    def test_e2(self):
        v = bracket_to_round(BracketMonomial([(1, 1), (1, 1)], 1))
        T = 7
        assert brute_force_Z(v, T) == (qm_to_series(E2, T + 1) * eta_power(-1, T)).truncate(T)

    def test_odd(self):
        v = bracket_to_round(BracketMonomial([(1, 2), (1, 1)], 1))
        assert brute_force_Z(v, 6) == QSeries.zero(6)

    def test_random_linearity(self):
        rnd = random.Random(3)
        basis = enum_basis(1, 4)
        a, b = rnd.sample(basis, 2)
        va, vb = st_vec(1, a), st_vec(1, b)
        assert brute_force_Z(va * 2 + vb * 3, 5) == brute_force_Z(va, 5).scale(2) + brute_force_Z(vb, 5).scale(3)


class TestQuasiprimary:
    def test_degree_le_four(self):
        # any polynomial in the h_i(-1) is annihilated by L(1)
        for k in range(5):
            for s in enum_basis(3, k):
                if all(n == 1 for _, n in s):
                    assert virasoro_L1(st_vec(3, s)).is_zero()
