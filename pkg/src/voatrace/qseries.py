"""Exact truncated q-series with rational exponents and Gaussian-rational coefficients."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "GaussianRational",
    "QSeries",
    "NonInvertible",
    "NotUpperHalfPlane",
    "gq",
    "parse_rational",
    "format_rational",
    "add",
    "mul",
    "series_pow",
    "eval_at_tau",
]

Rational = Union[int, Fraction]


class NonInvertible(ArithmeticError):
    pass


class NotUpperHalfPlane(ValueError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (also accepts ints and Fractions)."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = str(text).strip()
    if "/" in text:
        p, q = text.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise TypeError("only integral complex literals are exact")
            return cls(int(x.real), int(x.imag))
        if isinstance(x, str):
            return parse_gaussian(x)
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by zero GaussianRational")
        if not other.im:
            return GaussianRational(self.re / other.re, self.im / other.re)
        n = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{_imag_str(abs(self.im))})"

    def to_record(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}


def _imag_str(im: Fraction) -> str:
    if im == 1:
        return "i"
    if im == -1:
        return "-i"
    return f"{im}i"


def _coerce_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return None


def parse_gaussian(text: str) -> GaussianRational:
    """Parse strings like ``"3/4"``, ``"-2i"``, ``"1/2+3/5*i"``, ``"i"``."""
    s = text.replace(" ", "").replace("(", "").replace(")", "")
    if not s:
        raise ValueError("empty Gaussian rational")
    # split at a sign that is not leading
    cut = max(s.rfind("+"), s.rfind("-"))
    parts = [s] if cut <= 0 else [s[:cut], s[cut:]]
    total = GaussianRational(0)
    for part in parts:
        if part.endswith("i"):
            body = part[:-1].rstrip("*")
            if body in ("", "+"):
                coef = Fraction(1)
            elif body == "-":
                coef = Fraction(-1)
            else:
                coef = parse_rational(body.lstrip("+"))
            total = total + GaussianRational(0, coef)
        else:
            total = total + GaussianRational(parse_rational(part.lstrip("+")))
    return total


def gq(x) -> GaussianRational:
    """Coerce ints, Fractions, strings, and integral complex numbers."""
    return GaussianRational.coerce(x)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)


class QSeries:
    """Sparse truncated series ``sum c_e q^e + O(q^T)``.

    ``terms`` maps exact rational exponents to nonzero Gaussian rationals;
    every stored exponent is strictly below ``truncation``.  Instances are
    treated as immutable.
    """

    __slots__ = ("terms", "truncation")

    def __init__(self, terms: Mapping | Iterable = (), truncation: Rational = 0):
        T = Fraction(truncation)
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for e, c in items:
            e = Fraction(e)
            if e >= T:
                continue
            c = gq(c)
            if e in clean:
                c = clean[e] + c
            if c:
                clean[e] = c
            else:
                clean.pop(e, None)
        self.terms = dict(sorted(clean.items()))
        self.truncation = T

    @classmethod
    def _raw(cls, terms: dict, truncation: Fraction) -> "QSeries":
        # caller guarantees canonical form
        obj = cls.__new__(cls)
        obj.terms = dict(sorted(terms.items()))
        obj.truncation = truncation
        return obj

    @classmethod
    def constant(cls, c, truncation: Rational) -> "QSeries":
        return cls({0: c}, truncation)

    @classmethod
    def monomial(cls, exponent: Rational, c=1, truncation: Rational | None = None) -> "QSeries":
        exponent = Fraction(exponent)
        if truncation is None:
            truncation = exponent + 1
        return cls({exponent: c}, truncation)

    @classmethod
    def zero(cls, truncation: Rational) -> "QSeries":
        return cls({}, truncation)

    # -- inspection ---------------------------------------------------------

    def val(self) -> Fraction:
        """Least stored exponent; the truncation for the zero series."""
        if not self.terms:
            return self.truncation
        return next(iter(self.terms))

    def coefficient(self, exponent: Rational) -> GaussianRational:
        exponent = Fraction(exponent)
        if exponent >= self.truncation:
            raise ValueError(f"q^{exponent} lies beyond the truncation {self.truncation}")
        return self.terms.get(exponent, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def exponent_denominator(self) -> int:
        den = 1
        for e in self.terms:
            den = math.lcm(den, e.denominator)
        return den

    def truncate(self, T: Rational) -> "QSeries":
        T = Fraction(T)
        if T >= self.truncation:
            return self
        return QSeries._raw({e: c for e, c in self.terms.items() if e < T}, T)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = _scalar_or_none(other)
            if other is None:
                return NotImplemented
            other = QSeries.constant(other, self.truncation)
        T = min(self.truncation, other.truncation)
        out = {e: c for e, c in self.terms.items() if e < T}
        for e, c in other.terms.items():
            if e >= T:
                continue
            s = out[e] + c if e in out else c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return QSeries._raw(out, T)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw({e: -c for e, c in self.terms.items()}, self.truncation)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = _scalar_or_none(other)
            if other is None:
                return NotImplemented
            other = QSeries.constant(other, self.truncation)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = gq(c)
        if not c:
            return QSeries.zero(self.truncation)
        return QSeries._raw({e: v * c for e, v in self.terms.items()}, self.truncation)

    def shift(self, exponent: Rational) -> "QSeries":
        """Multiply by ``q^exponent`` (exact, truncation shifts too)."""
        exponent = Fraction(exponent)
        return QSeries._raw(
            {e + exponent: c for e, c in self.terms.items()}, self.truncation + exponent
        )

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            other = _scalar_or_none(other)
            if other is None:
                return NotImplemented
            return self.scale(other)
        T = min(self.truncation + other.val(), other.truncation + self.val())
        out: dict = {}
        b_items = list(other.terms.items())
        for ea, ca in self.terms.items():
            for eb, cb in b_items:
                e = ea + eb
                if e >= T:
                    break
                p = ca * cb
                if e in out:
                    out[e] = out[e] + p
                else:
                    out[e] = p
        return QSeries._raw({e: c for e, c in out.items() if c}, T)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return series_pow(self, k)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        T = min(self.truncation, other.truncation)
        return self.truncate(T).terms == other.truncate(T).terms

    def __hash__(self):
        return hash((tuple(self.terms.items()), self.truncation))

    def identical(self, other: "QSeries") -> bool:
        """Same terms and same truncation."""
        return self.truncation == other.truncation and self.terms == other.terms

    # -- rendering ----------------------------------------------------------

    def __repr__(self):
        return f"QSeries({str(self)})"

    def __str__(self):
        parts = []
        for e, c in self.terms.items():
            parts.append(_term_str(c, e))
        parts.append(f"O({_qpow_str(self.truncation)})")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    def to_records(self) -> dict:
        return {
            "terms": [
                {"exponent": format_rational(e), **c.to_record()} for e, c in self.terms.items()
            ],
            "truncation": format_rational(self.truncation),
        }

    @classmethod
    def from_records(cls, data: Mapping) -> "QSeries":
        terms = [
            (parse_rational(r["exponent"]), GaussianRational(parse_rational(r["re"]), parse_rational(r["im"])))
            for r in data["terms"]
        ]
        return cls(terms, parse_rational(data["truncation"]))

    def eval_at_tau(self, tau: complex) -> complex:
        return eval_at_tau(self, tau)


def _scalar_or_none(x):
    if isinstance(x, (int, Fraction, GaussianRational)):
        return gq(x)
    return None


def _qpow_str(e: Fraction) -> str:
    if e == 1:
        return "q"
    if e.denominator == 1 and e >= 0:
        return f"q^{e}"
    return f"q^({e})"


def _term_str(c: GaussianRational, e: Fraction) -> str:
    if e == 0:
        return str(c)
    qs = _qpow_str(e)
    if c == 1:
        return qs
    if c == -1:
        return f"-{qs}"
    return f"{c}*{qs}"


# -- functional interface ----------------------------------------------------


def add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def _reciprocal_unit(u: QSeries) -> QSeries:
    """Inverse of a series with val 0 and constant term nonzero."""
    den = u.exponent_denominator()
    T = u.truncation
    n_terms = math.ceil(T * den)  # indices j with j/den < T
    coeffs = [ZERO] * n_terms
    for e, c in u.terms.items():
        coeffs[int(e * den)] = c
    c0_inv = ONE / coeffs[0]
    inv = [ZERO] * n_terms
    if n_terms:
        inv[0] = c0_inv
    nonzero = [(j, c) for j, c in enumerate(coeffs) if j and c]
    for n in range(1, n_terms):
        acc = ZERO
        for j, c in nonzero:
            if j > n:
                break
            if inv[n - j]:
                acc = acc + c * inv[n - j]
        inv[n] = -acc * c0_inv
    return QSeries({Fraction(j, den): c for j, c in enumerate(inv) if c}, T)


def series_pow(a: QSeries, k: int) -> QSeries:
    """Integer power; negative ``k`` inverts the series first."""
    if k == 0:
        return QSeries.constant(1, a.truncation - a.val())
    if k < 0:
        if a.is_zero():
            raise NonInvertible("cannot invert a series that vanishes to displayed order")
        v = a.val()
        lead = a.terms[v]
        unit = a.shift(-v).scale(ONE / lead)
        inv = _reciprocal_unit(unit).scale(ONE / lead).shift(-v)
        return series_pow(inv, -k)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def eval_at_tau(a: QSeries, tau: complex) -> complex:
    """Numerically sum every stored term at ``q = exp(2 pi i tau)``."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise NotUpperHalfPlane(f"Im(tau) must be positive, got {tau!r}")
    re_parts, im_parts = [], []
    for e, c in a.terms.items():
        z = complex(c) * cmath.exp(2j * math.pi * float(e) * tau)
        re_parts.append(z.real)
        im_parts.append(z.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))
