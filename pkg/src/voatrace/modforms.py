"""Eisenstein series, eta powers and the ring C[E2, E4, E6] of quasi-modular forms.

Eisenstein series use the normalization

    E_2k = -B_2k/(2k)! + 2/(2k-1)! * sum_n sigma_{2k-1}(n) q^n

so that E_2 = -1/12 + 2q + ..., E_4 = 1/720 + q/3 + ... and the E8 theta
series equals 720*E_4.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .qseries import GaussianRational, QSeries, gq

__all__ = [
    "BadWeight",
    "SolveFailed",
    "NotInRing",
    "InsufficientPrecision",
    "QuasiModular",
    "E2",
    "E4",
    "E6",
    "bernoulli",
    "sigma",
    "eisenstein",
    "eta_power",
    "qm_to_series",
    "reduce_e2k",
    "eisenstein_qm",
    "qm_from_series",
    "qm_basis",
    "solve_exact",
]


class BadWeight(ValueError):
    pass


class SolveFailed(ArithmeticError):
    pass


class NotInRing(ValueError):
    pass


class InsufficientPrecision(ValueError):
    pass


# -- Bernoulli numbers -------------------------------------------------------

_bernoulli = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2, computed by the standard recurrence and cached."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n < len(_bernoulli):
        return _bernoulli[n]
    with _bernoulli_lock:
        while len(_bernoulli) <= n:
            m = len(_bernoulli)
            acc = sum(math.comb(m + 1, j) * _bernoulli[j] for j in range(m))
            _bernoulli.append(-acc / (m + 1))
    return _bernoulli[n]


def sigma(k: int, n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            e = n // d
            if e != d:
                total += e**k
        d += 1
    return total


def _n_integer_terms(T) -> int:
    """Number of integer exponents 0, 1, ... strictly below T."""
    T = Fraction(T)
    return max(0, math.ceil(T))


def _dense_eisenstein(two_k: int, n: int) -> list[Fraction]:
    if two_k < 2 or two_k % 2:
        raise BadWeight(f"Eisenstein weight must be even and >= 2, got {two_k}")
    out = [Fraction(0)] * n
    if n == 0:
        return out
    out[0] = -bernoulli(two_k) / math.factorial(two_k)
    scale = Fraction(2, math.factorial(two_k - 1))
    for m in range(1, n):
        out[m] = scale * sigma(two_k - 1, m)
    return out


def eisenstein(two_k: int, T) -> QSeries:
    """q-expansion of E_2k through all exponents < T."""
    n = _n_integer_terms(T)
    coeffs = _dense_eisenstein(two_k, n)
    return QSeries(enumerate(coeffs), T)


# -- eta powers ----------------------------------------------------------------


def _euler_product(n: int) -> list[int]:
    """Coefficients of prod_{m>=1} (1 - q^m) below q^n (pentagonal numbers)."""
    out = [0] * n
    k = 0
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n:
            break
        sign = -1 if k % 2 else 1
        out[g1] += sign
        if k and g2 < n:
            out[g2] += sign
        k += 1
    return out


def _int_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j in range(min(len(b), n - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _int_inverse(a: list[int], n: int) -> list[int]:
    # a[0] == 1
    inv = [0] * n
    if n:
        inv[0] = 1
    for m in range(1, n):
        inv[m] = -sum(a[j] * inv[m - j] for j in range(1, min(m, len(a) - 1) + 1) if a[j])
    return inv


def _int_pow(a: list[int], k: int, n: int) -> list[int]:
    result = [1] + [0] * (n - 1) if n else []
    base = a
    while k:
        if k & 1:
            result = _int_mul(result, base, n)
        k >>= 1
        if k:
            base = _int_mul(base, base, n)
    return result


def eta_power(d: int, T) -> QSeries:
    """q^(d/24) * prod (1 - q^n)^d, truncated at T (d may be negative)."""
    offset = Fraction(d, 24)
    n = _n_integer_terms(Fraction(T) - offset)
    base = _euler_product(n)
    if d < 0:
        base = _int_inverse(base, n)
    coeffs = _int_pow(base, abs(d), n) if n else []
    return QSeries(((m + offset, c) for m, c in enumerate(coeffs) if c), T)


# -- quasi-modular polynomials ------------------------------------------------------


class QuasiModular:
    """Polynomial in E2, E4, E6; keys are exponent triples (e2, e4, e6)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for key, c in items:
            key = tuple(int(x) for x in key)
            if len(key) != 3 or min(key) < 0:
                raise ValueError(f"bad exponent triple {key}")
            c = gq(c)
            if key in clean:
                c = clean[key] + c
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def _raw(cls, terms: dict) -> "QuasiModular":
        obj = cls.__new__(cls)
        obj.terms = dict(sorted(terms.items()))
        return obj

    @classmethod
    def constant(cls, c) -> "QuasiModular":
        return cls({(0, 0, 0): c})

    @staticmethod
    def weight_of(key) -> int:
        return 2 * key[0] + 4 * key[1] + 6 * key[2]

    def weights(self) -> set[int]:
        return {self.weight_of(k) for k in self.terms}

    def max_weight(self) -> int | None:
        return max(self.weights(), default=None)

    def e2_degree(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, e2: int, e4: int, e6: int) -> GaussianRational:
        return self.terms.get((e2, e4, e6), GaussianRational(0))

    def homogeneous_part(self, weight: int) -> "QuasiModular":
        return QuasiModular._raw({k: c for k, c in self.terms.items() if self.weight_of(k) == weight})

    def __add__(self, other):
        if not isinstance(other, QuasiModular):
            if isinstance(other, (int, Fraction, GaussianRational)):
                other = QuasiModular.constant(other)
            else:
                return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out[k] + c if k in out else c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return QuasiModular._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return QuasiModular._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = gq(other)
            if not c:
                return QuasiModular()
            return QuasiModular._raw({k: v * c for k, v in self.terms.items()})
        if not isinstance(other, QuasiModular):
            return NotImplemented
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = (ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2])
                p = ca * cb
                out[key] = out[key] + p if key in out else p
        return QuasiModular._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = QuasiModular.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = QuasiModular.constant(other)
        if not isinstance(other, QuasiModular):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        return f"QuasiModular({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.terms.items():
            mono = "*".join(
                f"{name}^{e}" if e > 1 else name
                for name, e in zip(("E2", "E4", "E6"), key)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_records(self) -> list[dict]:
        return [
            {"e2": k[0], "e4": k[1], "e6": k[2], **c.to_record()} for k, c in self.terms.items()
        ]

    @classmethod
    def from_records(cls, records) -> "QuasiModular":
        from .qseries import parse_rational

        return cls(
            ((r["e2"], r["e4"], r["e6"]), GaussianRational(parse_rational(r["re"]), parse_rational(r["im"])))
            for r in records
        )


E2 = QuasiModular({(1, 0, 0): 1})
E4 = QuasiModular({(0, 1, 0): 1})
E6 = QuasiModular({(0, 0, 1): 1})


def _dense_mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i in range(min(n, len(a))):
        x = a[i]
        if not x:
            continue
        for j in range(min(len(b), n - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


class _MonomialSeries:
    """Memo of dense E2^i E4^j E6^k expansions for one length."""

    def __init__(self, n: int):
        self.n = n
        self.gens = {w: _dense_eisenstein(w, n) for w in (2, 4, 6)}
        self.powers: dict = {}
        self.cache: dict = {}
        self.lock = threading.Lock()

    def power(self, w: int, e: int) -> list[Fraction]:
        key = (w, e)
        if key not in self.powers:
            if e == 0:
                val = [Fraction(1)] + [Fraction(0)] * (self.n - 1) if self.n else []
            else:
                val = _dense_mul(self.power(w, e - 1), self.gens[w], self.n)
            self.powers[key] = val
        return self.powers[key]

    def get(self, key) -> list[Fraction]:
        with self.lock:
            if key not in self.cache:
                i, j, k = key
                val = _dense_mul(self.power(2, i), self.power(4, j), self.n)
                val = _dense_mul(val, self.power(6, k), self.n)
                self.cache[key] = val
            return self.cache[key]


@lru_cache(maxsize=32)
def _monomial_table(n: int) -> _MonomialSeries:
    return _MonomialSeries(n)


def _monomial_dense(key, n: int) -> list[Fraction]:
    return _monomial_table(n).get(tuple(key))


def qm_to_series(p: QuasiModular, T) -> QSeries:
    """Expand a quasi-modular polynomial as an exact q-series below T."""
    n = _n_integer_terms(T)
    re = [Fraction(0)] * n
    im = [Fraction(0)] * n
    for key, c in p.terms.items():
        dense = _monomial_dense(key, n)
        for m, x in enumerate(dense):
            if x:
                if c.re:
                    re[m] += c.re * x
                if c.im:
                    im[m] += c.im * x
    return QSeries(((m, GaussianRational(re[m], im[m])) for m in range(n)), T)


# -- exact linear algebra ----------------------------------------------------------------


def solve_exact(rows: list[list[Fraction]], rhs: list[list]) -> tuple[list[list], int]:
    """Solve ``A x = b`` exactly for several right-hand sides.

    ``rows`` is the m x n matrix A, ``rhs`` a list of columns (length m).
    Returns (solutions, rank); raises SolveFailed when any system is
    inconsistent.  Free variables (rank < n) are set to zero.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    k = len(rhs)
    aug = [[Fraction(x) for x in rows[i]] + [Fraction(col[i]) for col in rhs] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if any(aug[i][n + j] for j in range(k)):
            raise SolveFailed("inconsistent linear system")
    sols = []
    for j in range(k):
        x = [Fraction(0)] * n
        for i, c in enumerate(pivots):
            x[c] = aug[i][n + j]
        sols.append(x)
    return sols, r


def _series_columns(s: QSeries, n: int) -> tuple[list[Fraction], list[Fraction]]:
    re = [Fraction(0)] * n
    im = [Fraction(0)] * n
    for e, c in s.terms.items():
        if e.denominator != 1 or e < 0:
            raise ValueError("expected integer exponents >= 0")
        if e < n:
            re[int(e)] = c.re
            im[int(e)] = c.im
    return re, im


@lru_cache(maxsize=None)
def reduce_e2k(two_k: int) -> QuasiModular:
    """E_2k as the unique weight-2k polynomial in E4 and E6."""
    if two_k < 4 or two_k % 2:
        raise BadWeight(f"reduce_e2k needs an even weight >= 4, got {two_k}")
    basis = [(0, a, b) for a in range(two_k // 4 + 1) for b in range(two_k // 6 + 1) if 4 * a + 6 * b == two_k]
    n = len(basis) + 12
    cols = [_monomial_dense(key, n) for key in basis]
    target = _dense_eisenstein(two_k, n)
    rows = [[col[i] for col in cols] for i in range(n)]
    (sol,), rank = solve_exact(rows, [target])
    if rank != len(basis):
        raise SolveFailed(f"monomial basis for weight {two_k} is degenerate")
    return QuasiModular({key: c for key, c in zip(basis, sol)})


def eisenstein_qm(two_k: int) -> QuasiModular:
    """E_2k in the generator basis: E2 itself, or its E4/E6 rewriting."""
    if two_k == 2:
        return E2
    return reduce_e2k(two_k)


def qm_basis(max_weight: int, min_weight: int = 0) -> list[tuple[int, int, int]]:
    """Monomials E2^i E4^j E6^k with min_weight <= weight <= max_weight, sorted."""
    out = []
    for i in range(max_weight // 2 + 1):
        for j in range(max_weight // 4 + 1):
            for k in range(max_weight // 6 + 1):
                w = 2 * i + 4 * j + 6 * k
                if min_weight <= w <= max_weight:
                    out.append((i, j, k))
    return sorted(out)


EXTRA_COEFFICIENTS = 5


def qm_from_series(s: QSeries, max_weight: int, min_weight: int = 0) -> QuasiModular:
    """Decompose an integral-exponent series into C[E2, E4, E6].

    Only monomials of weight between ``min_weight`` and ``max_weight`` are
    allowed.  Every available coefficient is matched, and at least
    ``dim + 5`` are required.
    """
    if max_weight < 0:
        raise BadWeight("max_weight must be >= 0")
    for e in s.terms:
        if e.denominator != 1 or e < 0:
            raise NotInRing(f"series has exponent {e}, not a non-negative integer")
    basis = qm_basis(max_weight, min_weight)
    n = _n_integer_terms(s.truncation)
    if n < len(basis) + EXTRA_COEFFICIENTS:
        raise InsufficientPrecision(
            f"need at least {len(basis) + EXTRA_COEFFICIENTS} coefficients, series has {n}"
        )
    cols = [_monomial_dense(key, n) for key in basis]
    rows = [[col[i] for col in cols] for i in range(n)]
    re, im = _series_columns(s, n)
    try:
        (sol_re, sol_im), rank = solve_exact(rows, [re, im])
    except SolveFailed:
        raise NotInRing("no element of C[E2,E4,E6] in the given weights matches the series") from None
    if rank < len(basis):
        raise InsufficientPrecision("coefficients do not determine the decomposition")
    return QuasiModular(
        {key: GaussianRational(a, b) for key, a, b in zip(basis, sol_re, sol_im)}
    )

