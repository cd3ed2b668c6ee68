"""Sparse multivariate polynomials over Q(i) and a small expression parser."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .qseries import GaussianRational, gq

__all__ = ["Poly", "PolySyntaxError", "parse_poly"]


class PolySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Poly:
    """Polynomial in x1..x_n; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping | Iterable = ()):
        self.nvars = int(nvars)
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for {self.nvars} variables")
            c = gq(c)
            if e in clean:
                c = clean[e] + c
            if c:
                clean[e] = c
            else:
                clean.pop(e, None)
        self.terms = dict(sorted(clean.items(), reverse=True))

    @classmethod
    def constant(cls, nvars: int, c=1) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """The coordinate x_i (1-based)."""
        if not 1 <= i <= nvars:
            raise ValueError(f"x{i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i - 1] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Poly":
        n = len(coeffs)
        out = cls(n)
        for i, c in enumerate(coeffs, start=1):
            out = out + cls.var(n, i) * gq(c)
        return out

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Poly.constant(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = gq(other)
            return Poly(self.nvars, {e: v * c for e, v in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                p = ca * cb
                out[e] = out[e] + p if e in out else p
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Poly.constant(self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = Poly.constant(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(self.terms.items())))

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def derivative(self, i: int) -> "Poly":
        out: dict = {}
        for e, c in self.terms.items():
            if e[i - 1]:
                f = list(e)
                f[i - 1] -= 1
                out[tuple(f)] = c * e[i - 1]
        return Poly(self.nvars, out)

    def evaluate(self, point: Sequence) -> GaussianRational:
        pt = [gq(x) for x in point]
        total = GaussianRational(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def __repr__(self):
        return f"Poly({self.nvars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e, 1) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>x\d+)|(?P<i>i)|(?P<op>[-+*^()]))")


def parse_poly(text: str, nvars: int) -> Poly:
    """Parse e.g. ``"x1^2 - x2^2"``, ``"(1+i)*x1 x2"`` or ``"3/2 i x1^3"``.

    Juxtaposition means multiplication; ``i`` is the imaginary unit.
    """
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        while text[pos].isspace():
            pos += 1
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    idx = 0

    def peek():
        return tokens[idx]

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def expr():
        sign = 1
        if peek()[1] in "+-" and peek()[0] == "op":
            sign = -1 if take()[1] == "-" else 1
        out = term() * sign
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            t = term()
            out = out + t if op == "+" else out - t
        return out

    def term():
        out = power()
        while True:
            kind, val, _ = peek()
            if kind == "op" and val == "*":
                take()
                out = out * power()
            elif kind in ("num", "var", "i") or (kind == "op" and val == "("):
                out = out * power()
            else:
                return out

    def power():
        base = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            kind, val, p = take()
            if kind != "num" or "/" in val:
                raise PolySyntaxError("exponent must be a non-negative integer", p)
            base = base ** int(val)
        return base

    def atom():
        kind, val, p = take()
        if kind == "num":
            n, _, dnm = val.partition("/")
            return Poly.constant(nvars, Fraction(int(n), int(dnm or 1)))
        if kind == "i":
            return Poly.constant(nvars, GaussianRational(0, 1))
        if kind == "var":
            k = int(val[1:])
            if not 1 <= k <= nvars:
                raise PolySyntaxError(f"variable {val} exceeds rank {nvars}", p)
            return Poly.var(nvars, k)
        if kind == "op" and val == "(":
            inner = expr()
            k2, v2, p2 = take()
            if v2 != ")":
                raise PolySyntaxError("expected ')'", p2)
            return inner
        raise PolySyntaxError(f"unexpected token {val!r}" if val else "unexpected end of input", p)

    result = expr()
    kind, val, p = peek()
    if kind != "end":
        raise PolySyntaxError(f"unexpected token {val!r}", p)
    return result
