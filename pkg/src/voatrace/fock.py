"""Rank-d free boson Fock space M(1).

States are monomials ``h_{i1}(-n1) ... h_{ik}(-nk) 1`` in an orthonormal
basis h_1..h_d of the Cartan space.  A state is stored as a tuple of
``(direction, mode)`` pairs sorted in descending order; a ``FockVector`` is a
finite linear combination of such states with Gaussian-rational coefficients.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .qseries import GaussianRational, QSeries, gq

__all__ = [
    "NotHomogeneous",
    "FockState",
    "FockVector",
    "BracketMonomial",
    "state_weight",
    "enum_basis",
    "apply_mode",
    "bracket_coeff",
    "bracket_to_round",
    "round_to_bracket",
    "virasoro_L1",
    "virasoro_L2",
    "zero_mode_trace",
    "zero_mode_poly",
    "brute_force_Z",
    "weight_components",
]

FockState = tuple  # tuple[tuple[int, int], ...], sorted descending


class NotHomogeneous(ValueError):
    pass


def make_state(parts: Iterable[tuple[int, int]]) -> FockState:
    return tuple(sorted(((int(i), int(n)) for i, n in parts), reverse=True))


def state_weight(state: FockState) -> int:
    return sum(n for _, n in state)


class FockVector:
    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping | Iterable = ()):
        self.rank = int(rank)
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for state, c in items:
            state = make_state(state)
            for i, n in state:
                if not 1 <= i <= self.rank or n < 1:
                    raise ValueError(f"bad part ({i}, {n}) for rank {self.rank}")
            c = gq(c)
            if state in clean:
                c = clean[state] + c
            if c:
                clean[state] = c
            else:
                clean.pop(state, None)
        self.terms = clean

    @classmethod
    def _raw(cls, rank: int, terms: dict) -> "FockVector":
        obj = cls.__new__(cls)
        obj.rank = rank
        obj.terms = terms
        return obj

    @classmethod
    def vacuum(cls, rank: int) -> "FockVector":
        return cls._raw(rank, {(): GaussianRational(1)})

    @classmethod
    def basis_state(cls, rank: int, state, c=1) -> "FockVector":
        return cls(rank, {make_state(state): c})

    def is_zero(self) -> bool:
        return not self.terms

    def weights(self) -> set[int]:
        return {state_weight(s) for s in self.terms}

    def __add__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        _check_rank(self, other)
        out = dict(self.terms)
        for s, c in other.terms.items():
            v = out[s] + c if s in out else c
            if v:
                out[s] = v
            else:
                out.pop(s, None)
        return FockVector._raw(self.rank, out)

    def __neg__(self):
        return FockVector._raw(self.rank, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if not isinstance(c, (int, Fraction, GaussianRational)):
            return NotImplemented
        c = gq(c)
        if not c:
            return FockVector._raw(self.rank, {})
        return FockVector._raw(self.rank, {s: v * c for s, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def __repr__(self):
        return f"FockVector(rank={self.rank}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for s, c in sorted(self.terms.items(), key=lambda kv: (-state_weight(kv[0]), kv[0])):
            mono = " ".join(f"h{i}(-{n})" for i, n in s) or "vac"
            if s:
                mono += " vac"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _check_rank(a, b):
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch: {a.rank} vs {b.rank}")


def weight_components(v: FockVector) -> dict[int, FockVector]:
    """Split a vector into its round-weight homogeneous pieces."""
    out: dict[int, dict] = {}
    for s, c in v.terms.items():
        out.setdefault(state_weight(s), {})[s] = c
    return {w: FockVector._raw(v.rank, t) for w, t in sorted(out.items())}


class BracketMonomial:
    """``h_{i1}[-n1] ... h_{ik}[-nk] 1``, canonically sorted by (n, direction) descending.

    Negative bracket modes commute with one another, so sorting is harmless.
    """

    __slots__ = ("rank", "factors")

    def __init__(self, factors: Iterable[tuple[int, int]] = (), rank: int = 1):
        self.rank = int(rank)
        fs = [(int(i), int(n)) for i, n in factors]
        for i, n in fs:
            if not 1 <= i <= self.rank:
                raise ValueError(f"direction {i} out of range for rank {self.rank}")
            if n < 1:
                raise ValueError(f"bracket factor h{i}[-{n}] needs n >= 1")
        self.factors = tuple(sorted(fs, key=lambda f: (f[1], f[0]), reverse=True))

    @classmethod
    def vacuum(cls, rank: int) -> "BracketMonomial":
        return cls((), rank)

    @property
    def weight(self) -> int:
        return sum(n for _, n in self.factors)

    def __len__(self):
        return len(self.factors)

    def __eq__(self, other):
        if not isinstance(other, BracketMonomial):
            return NotImplemented
        return self.rank == other.rank and self.factors == other.factors

    def __hash__(self):
        return hash((self.rank, self.factors))

    def __lt__(self, other):
        return (self.rank, self.weight, self.factors) < (other.rank, other.weight, other.factors)

    def __repr__(self):
        return f"BracketMonomial({list(self.factors)}, rank={self.rank})"

    def __str__(self):
        return " ".join([f"h{i}[-{n}]" for i, n in self.factors] + ["vac"])


# -- basis enumeration ---------------------------------------------------------------


def _partitions(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enum_basis(d: int, n: int) -> tuple[FockState, ...]:
    """All states of weight n (d-coloured partitions), in a fixed order."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    parts = [(i, m) for m in range(1, n + 1) for i in range(1, d + 1)]
    out = []

    def rec(idx: int, remaining: int, acc: list):
        if remaining == 0:
            out.append(make_state(acc))
            return
        if idx == len(parts):
            return
        i, m = parts[idx]
        k = 0
        while k * m <= remaining:
            rec(idx + 1, remaining - k * m, acc + [(i, m)] * k)
            k += 1

    rec(0, n, [])
    return tuple(sorted(out, reverse=True))


# -- mode actions ---------------------------------------------------------------------


def _apply_mode_state(i: int, n: int, state: FockState):
    """Return (new_state, factor) or None."""
    if n < 0:
        return make_state(state + ((i, -n),)), 1
    if n == 0:
        return None
    mult = state.count((i, n))
    if not mult:
        return None
    lst = list(state)
    lst.remove((i, n))
    return tuple(lst), mult * n


def apply_mode(i: int, n: int, v: FockVector) -> FockVector:
    """Action of h_i(n) on M(1); h_i(0) acts as zero on zero momentum."""
    if not 1 <= i <= v.rank:
        raise ValueError(f"direction {i} out of range for rank {v.rank}")
    out: dict = {}
    for s, c in v.terms.items():
        r = _apply_mode_state(i, n, s)
        if r is None:
            continue
        t, f = r
        val = c * f
        out[t] = out[t] + val if t in out else val
    return FockVector._raw(v.rank, {s: c for s, c in out.items() if c})


def virasoro_L1(v: FockVector) -> FockVector:
    """L(1) = sum_i sum_{k>=1} h_i(1-k) h_i(k)."""
    out = FockVector(v.rank)
    top = max(v.weights(), default=0)
    for i in range(1, v.rank + 1):
        for k in range(1, top + 1):
            out = out + apply_mode(i, 1 - k, apply_mode(i, k, v))
    return out


def virasoro_L2(v: FockVector) -> FockVector:
    """L(2) = 1/2 sum_i h_i(1)^2 + sum_i sum_{k>=2} h_i(2-k) h_i(k)."""
    out = FockVector(v.rank)
    top = max(v.weights(), default=0)
    for i in range(1, v.rank + 1):
        out = out + apply_mode(i, 1, apply_mode(i, 1, v)) * Fraction(1, 2)
        for k in range(2, top + 1):
            out = out + apply_mode(i, 2 - k, apply_mode(i, k, v))
    return out


# -- square-bracket modes ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _log_ratio_power(m: int, length: int) -> tuple[Fraction, ...]:
    """Coefficients of (ln(1+z)/z)^m below z^length (any integer m)."""
    base = [Fraction((-1) ** j, j + 1) for j in range(length)]
    if m < 0:
        inv = [Fraction(0)] * length
        inv[0] = Fraction(1)
        for n in range(1, length):
            inv[n] = -sum(base[j] * inv[n - j] for j in range(1, n + 1))
        base = inv
        m = -m
    out = [Fraction(1)] + [Fraction(0)] * (length - 1)
    for _ in range(m):
        out = [sum(out[j] * base[n - j] for j in range(n + 1)) for n in range(length)]
    return tuple(out)


def gbinom(x: int, k: int) -> Fraction:
    """Generalized binomial coefficient for integer x and k >= 0."""
    if k < 0:
        return Fraction(0)
    num = 1
    for j in range(k):
        num *= x - j
    return Fraction(num, math.factorial(k))


@lru_cache(maxsize=None)
def bracket_coeff(w: int, m: int, i: int) -> Fraction:
    """c(w, i, m): coefficient of z^i in (ln(1+z))^m (1+z)^(w-1)."""
    if i < m:
        return Fraction(0)
    j = i - m  # (ln(1+z))^m = z^m (ln(1+z)/z)^m
    logs = _log_ratio_power(m, j + 1)
    return sum(logs[t] * gbinom(w - 1, j - t) for t in range(j + 1))


def bracket_to_round(m: BracketMonomial) -> FockVector:
    """Expand a bracket monomial in the round-mode basis."""
    v = FockVector.vacuum(m.rank)
    for i, n in reversed(m.factors):
        top = max(v.weights(), default=0)
        out = FockVector(m.rank)
        for j in range(-n, top + 1):
            if j == 0:
                continue
            c = bracket_coeff(1, -n, j)
            if c:
                out = out + apply_mode(i, j, v) * c
        v = out
    return v


def round_to_bracket(v: FockVector) -> dict[BracketMonomial, GaussianRational]:
    """Inverse of ``bracket_to_round`` on linear combinations (unitriangular)."""
    rest = v
    out: dict = {}
    while not rest.is_zero():
        state = max(rest.terms, key=lambda s: (state_weight(s), s))
        c = rest.terms[state]
        mono = BracketMonomial(state, v.rank)
        out[mono] = out[mono] + c if mono in out else c
        rest = rest - bracket_to_round(mono) * c
    return {k: c for k, c in out.items() if c}


# -- zero modes and traces --------------------------------------------------------------


def _tuple_enumeration(factors: tuple, bound: int, zero_modes: bool) -> dict:
    """Normal-ordered mode tuples (m_1..m_k), sum 0, |m_j| <= bound, with a
    diagonal action: the annihilated multiset equals the created one.

    Returns {(annihilated multiset, zero-mode directions): coefficient}.
    """
    k = len(factors)
    out: dict = {}
    balance: Counter = Counter()
    annihilated: list = []
    zeros: list = []

    def rec(j: int, coeff: Fraction, pos: int, neg: int):
        if sum(abs(x) for x in balance.values()) > k - j:
            return
        if j == k:
            key = (tuple(sorted(annihilated)), tuple(sorted(zeros)))
            out[key] = out.get(key, 0) + coeff
            return
        i, n = factors[j]
        if zero_modes:
            c = gbinom(-1, n - 1)
            if c:
                zeros.append(i)
                rec(j + 1, coeff * c, pos, neg)
                zeros.pop()
        for q in range(1, bound + 1):
            # annihilation h_i(q)
            if pos + q <= bound:
                c = gbinom(-q - 1, n - 1)
                if c:
                    balance[(i, q)] += 1
                    annihilated.append((i, q))
                    rec(j + 1, coeff * c, pos + q, neg)
                    annihilated.pop()
                    balance[(i, q)] -= 1
            # creation h_i(-q)
            if neg + q <= bound:
                c = gbinom(q - 1, n - 1)
                if c:
                    balance[(i, q)] -= 1
                    rec(j + 1, coeff * c, pos, neg + q)
                    balance[(i, q)] += 1

    rec(0, Fraction(1), 0, 0)
    return {key: c for key, c in out.items() if c}


@lru_cache(maxsize=None)
def _normal_ordered_terms(state: FockState, bound: int, zero_modes: bool) -> dict:
    return _tuple_enumeration(tuple(reversed(state)), bound, zero_modes)


def _falling(x: int, c: int) -> int:
    out = 1
    for j in range(c):
        out *= x - j
    return out


@lru_cache(maxsize=None)
def _diagonal_trace(d: int, n: int, annihilated: tuple) -> int:
    """Trace over M(1)_n of (creators) x (annihilators) for a matched multiset."""
    if sum(q for _, q in annihilated) > n:
        return 0
    need = Counter(annihilated)
    total = 0
    for s in enum_basis(d, n):
        have = Counter(s)
        term = 1
        for (i, q), c in need.items():
            term *= q**c * _falling(have[(i, q)], c)
            if not term:
                break
        total += term
    return total


@lru_cache(maxsize=None)
def _state_trace_poly(d: int, state: FockState, n: int, zero_modes: bool) -> dict:
    terms = _normal_ordered_terms(state, n, zero_modes)
    out: dict = {}
    for (ann, zeros), c in terms.items():
        t = _diagonal_trace(d, n, ann)
        if not t:
            continue
        expo = [0] * d
        for i in zeros:
            expo[i - 1] += 1
        key = tuple(expo)
        out[key] = out.get(key, 0) + c * t
    return {k: v for k, v in out.items() if v}


def zero_mode_poly(v: FockVector, n: int) -> dict[tuple, GaussianRational]:
    """Trace of o(v) on M(1)_n (x) e^alpha as a polynomial in y_i = (h_i, alpha).

    Keys are exponent tuples over y_1..y_d.  ``v`` must be homogeneous.
    """
    ws = v.weights()
    if len(ws) > 1:
        raise NotHomogeneous(f"vector mixes round weights {sorted(ws)}")
    out: dict = {}
    for s, c in v.terms.items():
        for key, t in _state_trace_poly(v.rank, s, n, True).items():
            val = c * t
            out[key] = out[key] + val if key in out else val
    return {k: c for k, c in out.items() if c}


def zero_mode_trace(v: FockVector, n: int) -> GaussianRational:
    """tr_{M(1)_n} o(v) for homogeneous v."""
    ws = v.weights()
    if len(ws) > 1:
        raise NotHomogeneous(f"vector mixes round weights {sorted(ws)}")
    total = GaussianRational(0)
    for s, c in v.terms.items():
        t = _state_trace_poly(v.rank, s, n, False).get((0,) * v.rank, 0)
        if t:
            total = total + c * t
    return total


def brute_force_Z(v: FockVector, T) -> QSeries:
    """Graded trace sum_n tr_{M(1)_n} o(v) q^(n - d/24), by direct enumeration.

    Mixed-weight vectors are split into homogeneous pieces (o is linear).
    """
    d = v.rank
    shift = Fraction(d, 24)
    T = Fraction(T)
    terms: dict = {}
    n = 0
    while n - shift < T:
        for comp in weight_components(v).values():
            c = zero_mode_trace(comp, n)
            if c:
                e = n - shift
                terms[e] = terms[e] + c if e in terms else c
        n += 1
    return QSeries(terms, T)
