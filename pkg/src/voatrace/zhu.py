"""Symbolic trace engine for bracket monomials.

Traces are reduced with Zhu's recursion

    Z(a[-r]b) = delta_{r,1} tr o(a)o(b) q^(L0-c/24)
                + (-1)^(r+1) sum_{k > r/2} binom(2k-1, r-1) E_2k Z(a[2k-r]b)

where ``a[m]b`` for m > 0 is computed from ``[a[m], b[n]] = m delta_{m+n,0} (a,b)``.
On M(1) the zero mode of a weight-one vector vanishes; on M(1) (x) e^alpha it
acts by the scalar (a, alpha), kept here as a formal variable y_a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .fock import BracketMonomial
from .modforms import E2, QuasiModular, eisenstein_qm, eta_power, qm_to_series
from .qseries import QSeries

__all__ = [
    "PairingPolynomial",
    "BosonTraceResult",
    "reduce_boson_trace",
    "reduce_pairing_trace",
    "closed_form_lemma1",
    "closed_form_lemma2",
    "double_factorial",
]


class PairingPolynomial:
    """Polynomial in formal pairings y_i = (h_i, alpha) with quasi-modular coefficients."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping | Iterable = ()):
        self.rank = rank
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for key, f in items:
            key = tuple(key)
            if len(key) != rank:
                raise ValueError("pairing exponent has wrong length")
            if key in clean:
                f = clean[key] + f
            if f.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = f
        self.terms = dict(sorted(clean.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for k, f in other.terms.items():
            s = out[k] + f if k in out else f
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return PairingPolynomial(self.rank, out)

    def times(self, f: QuasiModular) -> "PairingPolynomial":
        return PairingPolynomial(self.rank, ((k, g * f) for k, g in self.terms.items()))

    def times_pairing(self, direction: int) -> "PairingPolynomial":
        def bump(k):
            k = list(k)
            k[direction - 1] += 1
            return tuple(k)

        return PairingPolynomial(self.rank, ((bump(k), g) for k, g in self.terms.items()))

    def constant_part(self) -> QuasiModular:
        return self.terms.get((0,) * self.rank, QuasiModular())

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PairingPolynomial):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, f in self.terms.items():
            mono = "*".join(
                f"y{i + 1}^{e}" if e > 1 else f"y{i + 1}" for i, e in enumerate(k) if e
            )
            parts.append(f"({f})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def _remove_one(factors: tuple, item) -> tuple:
    lst = list(factors)
    lst.remove(item)
    return tuple(lst)


@lru_cache(maxsize=None)
def _reduce(factors: tuple, rank: int, zero_mode: bool) -> PairingPolynomial:
    if not factors:
        return PairingPolynomial(rank, {(0,) * rank: QuasiModular.constant(1)})
    (i, r), rest = factors[0], factors[1:]
    out = PairingPolynomial(rank)
    if r == 1 and zero_mode:
        out = out + _reduce(rest, rank, zero_mode).times_pairing(i)
    sign = 1 if r % 2 else -1  # (-1)^(r+1)
    # a[m] b is nonzero only if b contains a factor (i, m)
    for m in sorted({n for j, n in rest if j == i and (n + r) % 2 == 0}):
        k = (m + r) // 2
        if 2 * k <= r:
            continue
        mult = rest.count((i, m))
        coeff = sign * math.comb(2 * k - 1, r - 1) * m * mult
        sub = _reduce(_remove_one(rest, (i, m)), rank, zero_mode)
        out = out + sub.times(eisenstein_qm(2 * k) * coeff)
    return out


@dataclass(frozen=True)
class BosonTraceResult:
    """Z(v, q) = qm_to_series(f) / eta^d."""

    f: QuasiModular
    rank: int

    def series(self, T) -> QSeries:
        return qm_to_series(self.f, T) * eta_power(-self.rank, T)


def reduce_boson_trace(m: BracketMonomial) -> BosonTraceResult:
    """Reduce Z(m, q) on M(1) to f / eta^d with f in C[E2, E4, E6]."""
    poly = _reduce(m.factors, m.rank, False)
    return BosonTraceResult(poly.constant_part(), m.rank)


def reduce_pairing_trace(m: BracketMonomial) -> PairingPolynomial:
    """Z_alpha(m, q) * eta^d / q^((alpha,alpha)/2) as a polynomial in (h_i, alpha)."""
    return _reduce(m.factors, m.rank, True)


def double_factorial(n: int) -> int:
    """n!! for odd n >= -1 (with (-1)!! = 1)."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def closed_form_lemma1(n: int, r: int) -> QuasiModular:
    """Closed form of eta^d Z(a[-n]^(2r) 1) for a unit vector a."""
    h = math.comb(2 * n - 1, n - 1)
    c = (-1) ** ((n + 1) * r) * n**r * double_factorial(2 * r - 1) * h**r
    return eisenstein_qm(2 * n) ** r * c


def closed_form_lemma2(r: int, s: int, variant: int = 12) -> QuasiModular:
    """Closed forms for a[-1]^(2r) a[-2]^(2s) 1 (variant 12) and
    a[-2]^(2r) a[-3]^(2s) 1 (variant 23, parameters read as s, t)."""
    if variant == 12:
        c = (-6) ** s * double_factorial(2 * r - 1) * double_factorial(2 * s - 1)
        return E2**r * eisenstein_qm(4) ** s * c
    if variant == 23:
        s_, t = r, s
        c = (-6) ** s_ * double_factorial(2 * s_ - 1) * double_factorial(2 * t - 1) * 30**t
        return eisenstein_qm(4) ** s_ * eisenstein_qm(6) ** t * c
    raise ValueError(f"variant must be 12 or 23, got {variant}")
