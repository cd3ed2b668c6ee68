"""Even positive-definite lattices, theta series and lattice VOA traces.

Two coordinate systems are used.  Lattice vectors are enumerated in
lattice-basis coordinates z (alpha = sum z_j b_j), while pairings (h_i, alpha)
and harmonic polynomials live in an orthonormal frame.  The frame is

    y_i = sqrt(s_i) * (F z)_i

with F rational and s_i squarefree positive integers.  A supplied embedding
gives s_i = 1; otherwise F and s come from the exact LDL^T factorization of
the Gram matrix.  Sums over lattice vectors are carried out on the rational
parts and the square-root factors are reattached at the end; a sum whose
result would be irrational raises ``NotExact``.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .fock import (
    BracketMonomial,
    FockVector,
    round_to_bracket,
    virasoro_L1,
    virasoro_L2,
    weight_components,
    zero_mode_poly,
)
from .modforms import eta_power, qm_from_series, qm_to_series
from .poly import Poly, parse_poly
from .qseries import GaussianRational, QSeries, gq, parse_gaussian, parse_rational
from .zhu import PairingPolynomial, reduce_pairing_trace

__all__ = [
    "BadGram",
    "NotPositiveDefinite",
    "BadEmbedding",
    "NotIsotropic",
    "NotHarmonic",
    "InternalPrimaryCheckFailed",
    "NotExact",
    "LevelUnavailable",
    "Lattice",
    "CosetRep",
    "HarmonicPoly",
    "PairingPolynomial",
    "enumerate_vectors",
    "theta_weighted",
    "theta_pairing",
    "laplacian",
    "isotropic_power",
    "primary_state",
    "theta_harmonic",
    "lattice_trace",
    "lattice_trace_qm",
    "brute_force_lattice_Z",
    "preset_dir",
    "load_preset",
    "lattice_from_spec",
    "harmonic_from_spec",
]


class BadGram(ValueError):
    pass


class NotPositiveDefinite(BadGram):
    pass


class BadEmbedding(ValueError):
    pass


class NotIsotropic(ValueError):
    pass


class NotHarmonic(ValueError):
    pass


class InternalPrimaryCheckFailed(AssertionError):
    pass


class NotExact(ArithmeticError):
    """A lattice sum would leave Q(i)."""


class LevelUnavailable(ValueError):
    pass


# -- small exact helpers ----------------------------------------------------------


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = a^2 * b with b squarefree; returns (a, b)."""
    a, b = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        a *= p ** (e // 2)
        if e % 2:
            b *= p
        p += 1
    return a, b * n


def _ldl(gram: Sequence[Sequence[int]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """gram = U^T diag(D) U with U unit upper triangular (exact)."""
    d = len(gram)
    D: list[Fraction] = []
    U = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for i in range(d):
        Di = Fraction(gram[i][i]) - sum(U[k][i] ** 2 * D[k] for k in range(i))
        if Di <= 0:
            raise NotPositiveDefinite("Gram matrix is not positive definite")
        D.append(Di)
        for j in range(i + 1, d):
            U[i][j] = (Fraction(gram[i][j]) - sum(U[k][i] * U[k][j] * D[k] for k in range(i))) / Di
    return D, U


def _inverse(gram: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    d = len(gram)
    aug = [[Fraction(gram[i][j]) for j in range(d)] + [Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for c in range(d):
        piv = next(i for i in range(c, d) if aug[i][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(d):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[d:] for row in aug]


@dataclass(frozen=True)
class CosetRep:
    """Shift vector lambda (lattice coordinates) of a coset L + lambda in L°."""

    shift: tuple

    def __post_init__(self):
        object.__setattr__(self, "shift", tuple(Fraction(x) for x in self.shift))

    @classmethod
    def zero(cls, rank: int) -> "CosetRep":
        return cls((0,) * rank)

    def is_zero(self) -> bool:
        return not any(self.shift)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.shift) + ")"


class Lattice:
    """Even positive-definite lattice given by its Gram matrix."""

    def __init__(self, gram, name: str = "", embedding=None, cosets=None):
        rows = [list(r) for r in gram]
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise BadGram("Gram matrix must be square and non-empty")
        try:
            g = [[_as_int(x) for x in r] for r in rows]
        except ValueError as exc:
            raise BadGram(str(exc)) from None
        for i in range(d):
            for j in range(d):
                if g[i][j] != g[j][i]:
                    raise BadGram(f"Gram matrix is not symmetric at ({i + 1}, {j + 1})")
            if g[i][i] % 2:
                raise BadGram(f"lattice is not even: diagonal entry {g[i][i]}")
        self.name = name
        self.gram = tuple(tuple(r) for r in g)
        self.rank = d
        self._D, self._U = _ldl(self.gram)
        det = math.prod(self._D)
        self.determinant = int(det)
        inv = _inverse(self.gram)
        N = 1
        for i in range(d):
            for j in range(d):
                x = inv[i][j] / 2 if i == j else inv[i][j]
                N = math.lcm(N, x.denominator)
        self.level = N
        self._inverse_gram = inv
        self.embedding = None
        if embedding is not None:
            B = [[Fraction(parse_rational(x)) for x in row] for row in embedding]
            if len(B) != d or any(len(row) != d for row in B):
                raise BadEmbedding("embedding must be a d x d matrix (rows = basis vectors)")
            for i in range(d):
                for j in range(d):
                    if sum(a * b for a, b in zip(B[i], B[j])) != g[i][j]:
                        raise BadEmbedding(f"embedding does not reproduce gram entry ({i + 1}, {j + 1})")
            self.embedding = tuple(tuple(r) for r in B)
            frame = [[B[j][i] for j in range(d)] for i in range(d)]
            scales = [1] * d
        else:
            frame, scales = [], []
            for i in range(d):
                p, q = self._D[i].numerator, self._D[i].denominator
                a, b = _squarefree_split(p * q)
                factor = Fraction(a, q)
                frame.append([factor * u for u in self._U[i]])
                scales.append(b)
        self.frame = tuple(tuple(r) for r in frame)
        self.scales = tuple(scales)
        if cosets is None:
            self.cosets = self._compute_cosets()
        else:
            self.cosets = [self._check_coset(CosetRep(tuple(parse_rational(x) for x in c))) for c in cosets]
        self._tables: dict = {}
        self._lock = threading.Lock()

    # -- structure ------------------------------------------------------------

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        return sum(Fraction(x[i]) * self.gram[i][j] * Fraction(y[j]) for i in range(self.rank) for j in range(self.rank))

    def _check_coset(self, c: CosetRep) -> CosetRep:
        if len(c.shift) != self.rank:
            raise BadGram(f"coset vector has length {len(c.shift)}, expected {self.rank}")
        for i in range(self.rank):
            if sum(self.gram[i][j] * c.shift[j] for j in range(self.rank)).denominator != 1:
                raise BadGram(f"coset {c} is not in the dual lattice")
        return c

    def _compute_cosets(self) -> list[CosetRep]:
        d = self.rank
        gens = [tuple(self._inverse_gram[i][j] % 1 for i in range(d)) for j in range(d)]
        zero = (Fraction(0),) * d
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    w = tuple((a + b) % 1 for a, b in zip(v, g))
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        if len(seen) != self.determinant:
            raise BadGram("discriminant group size does not match the determinant")
        reps = sorted(seen - {zero})
        return [CosetRep(zero)] + [CosetRep(r) for r in reps]

    def coset(self, index: int) -> CosetRep:
        if not 0 <= index < len(self.cosets):
            raise IndexError(f"coset index {index} out of range (0..{len(self.cosets) - 1})")
        return self.cosets[index]

    def orthonormal_coordinates(self, z: Sequence) -> tuple:
        """Exact orthonormal coordinates; only available when all scales are 1."""
        if any(s != 1 for s in self.scales):
            raise NotExact("orthonormal coordinates involve square roots for this lattice")
        return tuple(sum(self.frame[i][j] * Fraction(z[j]) for j in range(self.rank)) for i in range(self.rank))

    def to_spec(self) -> dict:
        out: dict = {"name": self.name, "gram": [list(r) for r in self.gram]}
        if self.embedding is not None:
            out["embedding"] = [[f"{x.numerator}/{x.denominator}" for x in row] for row in self.embedding]
        out["cosets"] = [[f"{x.numerator}/{x.denominator}" for x in c.shift] for c in self.cosets]
        return out

    def __repr__(self):
        return f"Lattice(name={self.name!r}, rank={self.rank}, det={self.determinant}, level={self.level})"

    # -- vector tables ----------------------------------------------------------

    def table(self, coset: CosetRep | None, bound) -> "_VectorTable":
        """Cached enumeration of L + coset with (a,a)/2 <= bound."""
        coset = coset or CosetRep.zero(self.rank)
        key = (coset.shift, Fraction(bound))
        with self._lock:
            tab = self._tables.get(key)
            if tab is None:
                # reuse a larger table if one exists
                for (shift, b), t in self._tables.items():
                    if shift == coset.shift and b >= key[1]:
                        tab = t.restrict(key[1])
                        break
                else:
                    tab = _VectorTable(self, coset, key[1])
                self._tables[key] = tab
            return tab


def _as_int(x) -> int:
    if isinstance(x, bool):
        raise ValueError("boolean in Gram matrix")
    if isinstance(x, int):
        return x
    f = parse_rational(x)
    if f.denominator != 1:
        raise ValueError(f"non-integral Gram entry {x}")
    return int(f)


# -- enumeration -------------------------------------------------------------------


def _isqrt_array(x: np.ndarray) -> np.ndarray:
    """Exact floor(sqrt(x)) for non-negative int64 entries."""
    s = np.floor(np.sqrt(x.astype(np.float64))).astype(np.int64)
    s = np.where(s * s > x, s - 1, s)
    s = np.where((s + 1) * (s + 1) <= x, s + 1, s)
    return s


def _enumerate_offsets(L: Lattice, shift: tuple, bound: Fraction) -> np.ndarray:
    """Integer offsets k with (lambda+k, lambda+k)/2 <= bound.

    Fincke-Pohst over the LDL^T form, processed one coordinate at a time for
    all partial vectors at once.  Everything is scaled to integers, so the
    pruning is exact.
    """
    D, U = L._D, L._U
    d = L.rank
    den = 1
    for x in shift:
        den = math.lcm(den, x.denominator)
    lcm_u = 1
    for row in U:
        for x in row:
            lcm_u = math.lcm(lcm_u, x.denominator)
    lcm_d = 1
    for x in D:
        lcm_d = math.lcm(lcm_d, x.denominator)
    M = lcm_u * den
    Uint = np.array([[int(x * lcm_u) for x in row] for row in U], dtype=np.int64)
    e = [int(x * lcm_d) for x in D]
    R = math.floor(2 * bound * M * M * lcm_d)
    if R < 0:
        return np.zeros((0, d), dtype=np.int64)
    if R >= 2**62:
        raise OverflowError("enumeration bound too large for 64-bit arithmetic")
    base = [int(x * den) for x in shift]  # den * shift_i

    ks = np.zeros((1, d), dtype=np.int64)
    acc = np.zeros((1, d), dtype=np.int64)
    rem = np.array([R], dtype=np.int64)
    for i in reversed(range(d)):
        A = lcm_u * base[i] + acc[:, i]
        s = _isqrt_array(rem // e[i])
        lo = -np.floor_divide(A + s, M)
        hi = np.floor_divide(s - A, M)
        counts = np.maximum(hi - lo + 1, 0)
        idx = np.repeat(np.arange(len(counts)), counts)
        starts = np.cumsum(counts) - counts
        k = lo[idx] + (np.arange(len(idx)) - starts[idx])
        ks = ks[idx]
        ks[:, i] = k
        acc = acc[idx]
        T = M * k + A[idx]
        rem = rem[idx] - e[i] * T * T
        Y = base[i] + den * k
        if i:
            acc[:, :i] += np.outer(Y, Uint[:i, i])
    return ks


class _VectorTable:
    """All vectors of L + lambda up to a norm bound, with frame data."""

    def __init__(self, L: Lattice, coset: CosetRep, bound: Fraction, _data=None):
        self.lattice = L
        self.coset = coset
        self.bound = bound
        self._moments: dict = {}
        self._lock = threading.Lock()
        if _data is not None:
            self.Z, self.den, self.norm_num = _data
        else:
            shift = coset.shift
            den = 1
            for x in shift:
                den = math.lcm(den, x.denominator)
            offsets = _enumerate_offsets(L, shift, bound)
            base = np.array([int(x * den) for x in shift], dtype=np.int64)
            Z = offsets * den + base
            G = np.array(L.gram, dtype=np.int64)
            norm_num = np.einsum("ij,jk,ik->i", Z, G, Z)  # (a, a) * den^2
            order = np.lexsort(tuple(Z[:, j] for j in reversed(range(L.rank))) + (norm_num,))
            self.Z = Z[order]
            self.norm_num = norm_num[order]
            self.den = den
        fden = 1
        for row in L.frame:
            for x in row:
                fden = math.lcm(fden, x.denominator)
        Fint = np.array([[int(x * fden) for x in row] for row in L.frame], dtype=object)
        W = (self.Z.astype(object) @ Fint.T) if len(self.Z) else np.zeros((0, L.rank), dtype=object)
        if len(self.Z) and np.max(np.abs(W)) < 2**31:
            W = W.astype(np.int64)
        self.W = W
        self.coord_den = fden * self.den
        # half norms: norm_num / (2 den^2)
        keys, inverse = np.unique(self.norm_num, return_inverse=True)
        self.exponents = [Fraction(int(k), 2 * self.den**2) for k in keys]
        self.inverse = inverse.reshape(-1)

    def __len__(self):
        return len(self.Z)

    def restrict(self, bound: Fraction) -> "_VectorTable":
        keep = self.norm_num <= 2 * bound * self.den**2
        return _VectorTable(self.lattice, self.coset, bound, (self.Z[keep], self.den, self.norm_num[keep]))

    def vectors(self) -> list[tuple]:
        shift_den = self.den
        return [tuple(Fraction(int(x), shift_den) for x in row) for row in self.Z]

    def half_norms(self) -> list[Fraction]:
        return [self.exponents[i] for i in self.inverse]

    def moment(self, expo: tuple) -> tuple[dict, int, int]:
        """Sum over vectors of prod_i (F z)_i^{t_i}, grouped by half norm.

        Returns ({half_norm: rational}, a, b) where the true pairing sum is
        a * sqrt(b) times the rational values.
        """
        expo = tuple(expo)
        with self._lock:
            if expo in self._moments:
                return self._moments[expo]
        n = len(self.Z)
        deg = sum(expo)
        S = math.prod(s**t for s, t in zip(self.lattice.scales, expo))
        a, b = _squarefree_split(S)
        if n == 0:
            result = ({}, a, b)
        else:
            W = self.W
            vals = None
            if W.dtype == np.int64:
                bound = 1
                for i, t in enumerate(expo):
                    if t:
                        bound *= int(np.max(np.abs(W[:, i]))) ** t
                dtype = np.int64 if bound * n < 2**62 else object
            else:
                dtype = object
            vals = np.ones(n, dtype=dtype)
            for i, t in enumerate(expo):
                if t:
                    vals = vals * (W[:, i].astype(dtype) ** t)
            sums = np.zeros(len(self.exponents), dtype=dtype)
            np.add.at(sums, self.inverse, vals)
            scale = Fraction(1, self.coord_den**deg)
            result = ({e: int(s) * scale for e, s in zip(self.exponents, sums) if s}, a, b)
        with self._lock:
            self._moments[expo] = result
        return result


def enumerate_vectors(L: Lattice, coset: CosetRep | None, bound) -> list[tuple]:
    """All alpha in L + coset with (alpha, alpha)/2 <= bound, in lattice coordinates.

    Ordered by norm, then lexicographically by coordinates.
    """
    bound = Fraction(bound)
    if bound < 0:
        return []
    return L.table(coset, bound).vectors()


def _pairing_sum(tab: _VectorTable, poly: Mapping[tuple, object], T) -> QSeries:
    """sum_alpha sum_t c_t prod y_i^{t_i} q^{(alpha,alpha)/2}, exponents < T.

    ``c_t`` are Gaussian rationals or QSeries (multiplied in as series).
    """
    T = Fraction(T)
    by_radical: dict = {}
    for expo, c in poly.items():
        mom, a, b = tab.moment(expo)
        series = QSeries({e: v * a for e, v in mom.items()}, T)
        term = c * series if isinstance(c, QSeries) else series.scale(c)
        by_radical[b] = by_radical[b] + term if b in by_radical else term
    total = QSeries.zero(T)
    for b, s in by_radical.items():
        if b == 1:
            total = total + s
        elif not s.is_zero():
            raise NotExact(f"lattice sum has a nonvanishing sqrt({b}) component")
    return total.truncate(T) if total.truncation > T else total


def _exponent_bound(T) -> Fraction:
    # largest half norm we may need when exponents must stay below T
    return Fraction(T)


def theta_pairing(L: Lattice, coset: CosetRep | None, expo: Sequence[int], T) -> QSeries:
    """sum over L + coset of prod_i (h_i, alpha)^{t_i} q^{(alpha,alpha)/2}."""
    tab = L.table(coset, _exponent_bound(T))
    return _pairing_sum(tab, {tuple(expo): GaussianRational(1)}, T)


def theta_weighted(L: Lattice, coset: CosetRep | None, a: Sequence, k: int, T) -> QSeries:
    """sum over L + coset of (a, alpha)^k q^{(alpha,alpha)/2}; ``a`` in the orthonormal frame."""
    if len(a) != L.rank:
        raise ValueError(f"weight vector has length {len(a)}, expected {L.rank}")
    poly = Poly.linear([gq(x) for x in a]) ** k
    tab = L.table(coset, _exponent_bound(T))
    return _pairing_sum(tab, poly.terms, T)


# -- harmonic polynomials ------------------------------------------------------------


def laplacian(P: Poly) -> Poly:
    out = Poly(P.nvars)
    for i in range(1, P.nvars + 1):
        out = out + P.derivative(i).derivative(i)
    return out


class HarmonicPoly:
    """Homogeneous polynomial with vanishing Laplacian."""

    __slots__ = ("poly", "degree")

    def __init__(self, poly: Poly):
        if not poly.is_homogeneous():
            raise NotHarmonic("harmonic polynomial must be homogeneous")
        if not laplacian(poly).is_zero():
            raise NotHarmonic(f"Laplacian of {poly} is {laplacian(poly)}")
        self.poly = poly
        self.degree = poly.degree()

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def __eq__(self, other):
        if not isinstance(other, HarmonicPoly):
            return NotImplemented
        return self.poly == other.poly

    def __repr__(self):
        return f"HarmonicPoly({self.poly})"


def isotropic_power(t: Sequence, k: int) -> HarmonicPoly:
    """(t_1 x_1 + ... + t_d x_d)^k with sum t_i^2 = 0."""
    ts = [gq(x) for x in t]
    norm = sum((x * x for x in ts), GaussianRational(0))
    if k >= 2 and norm:
        raise NotIsotropic(f"sum of t_i^2 is {norm}, not 0")
    return HarmonicPoly(Poly.linear(ts) ** k)


def _as_poly(P) -> Poly:
    return P.poly if isinstance(P, HarmonicPoly) else P


def primary_state(P) -> FockVector:
    """v_P = P(h_1(-1), ..., h_d(-1)) 1, checked to satisfy L(1)v = L(2)v = 0."""
    poly = _as_poly(P)
    if not poly.is_homogeneous():
        raise NotHarmonic("polynomial must be homogeneous")
    if not laplacian(poly).is_zero():
        raise NotHarmonic(f"Laplacian of {poly} is {laplacian(poly)}, so L(2) v_P != 0")
    d = poly.nvars
    v = FockVector(
        d,
        (
            (tuple((i + 1, 1) for i, e in enumerate(expo) for _ in range(e)), c)
            for expo, c in poly.terms.items()
        ),
    )
    if not virasoro_L1(v).is_zero() or not virasoro_L2(v).is_zero():
        raise InternalPrimaryCheckFailed(f"v_P for {poly} is not primary")
    return v


def theta_harmonic(L: Lattice, P, T, coset: CosetRep | None = None) -> QSeries:
    """theta_L(P, q) = sum_alpha P(alpha) q^{(alpha,alpha)/2}."""
    poly = _as_poly(P)
    if poly.nvars != L.rank:
        raise ValueError(f"polynomial has {poly.nvars} variables, lattice rank is {L.rank}")
    tab = L.table(coset, _exponent_bound(T))
    return _pairing_sum(tab, poly.terms, T)


# -- lattice traces ---------------------------------------------------------------------


def _as_bracket_combination(v) -> dict:
    if isinstance(v, BracketMonomial):
        return {v: GaussianRational(1)}
    if isinstance(v, FockVector):
        return round_to_bracket(v)
    return {m: gq(c) for m, c in dict(v).items()}


def lattice_trace(v, L: Lattice, coset: CosetRep | None, T, momentum: Sequence | None = None) -> QSeries:
    """Z_{L+lambda}(v, q) via the symbolic recursion and weighted theta sums.

    ``v`` is a BracketMonomial, a {BracketMonomial: coeff} mapping or a
    FockVector (converted to bracket form).  A nonzero ``momentum`` means v
    lies in M(1) (x) e^beta with beta != 0, whose trace vanishes.
    """
    T = Fraction(T)
    if momentum is not None and any(Fraction(x) for x in momentum):
        return QSeries.zero(T)
    combo = _as_bracket_combination(v)
    d = L.rank
    shift = Fraction(d, 24)
    inner_T = T + shift
    poly: dict = {}
    for m, c in combo.items():
        if m.rank != d:
            raise ValueError(f"monomial rank {m.rank} does not match lattice rank {d}")
        for expo, f in reduce_pairing_trace(m).terms.items():
            s = qm_to_series(f, inner_T).scale(c)
            poly[expo] = poly[expo] + s if expo in poly else s
    tab = L.table(coset, _exponent_bound(inner_T))
    body = _pairing_sum(tab, poly, inner_T)
    return (body * eta_power(-d, T)).truncate(T)


def lattice_trace_qm(v, L: Lattice):
    """eta^d Z(v, q) as an element of C[E2, E4, E6] (level-one lattices, even rank)."""
    if L.level != 1 or L.rank % 2:
        raise LevelUnavailable(
            f"modular decomposition is only implemented for level 1 and even rank (level {L.level}, rank {L.rank})"
        )
    from .modforms import EXTRA_COEFFICIENTS, qm_basis

    combo = _as_bracket_combination(v)
    weights = {m.weight for m in combo}
    if len(weights) > 1:
        raise ValueError("decomposition needs a bracket-homogeneous vector")
    w = weights.pop() + L.rank // 2
    n = len(qm_basis(w, w)) + EXTRA_COEFFICIENTS
    d = L.rank
    Z = lattice_trace(combo, L, None, n - Fraction(d, 24))
    return qm_from_series((Z * eta_power(d, n + Fraction(d, 24))).truncate(n), w, w)


def brute_force_lattice_Z(v: FockVector, L: Lattice, coset: CosetRep | None, T) -> QSeries:
    """Graded trace over V_{L+lambda} = sum_alpha M(1) (x) e^alpha by direct enumeration.

    On each M(1)_n (x) e^alpha the zero mode is traced with h_i(0) acting as
    (h_i, alpha); mixed-weight vectors are split into homogeneous pieces.
    """
    T = Fraction(T)
    if v.rank != L.rank:
        raise ValueError(f"vector rank {v.rank} does not match lattice rank {L.rank}")
    d = L.rank
    shift = Fraction(d, 24)
    tab = L.table(coset, _exponent_bound(T + shift))
    total = QSeries.zero(T)
    n = 0
    while n - shift < T:
        poly: dict = {}
        for comp in weight_components(v).values():
            for expo, c in zero_mode_poly(comp, n).items():
                poly[expo] = poly[expo] + c if expo in poly else c
        if poly:
            # exponents n + |alpha|^2/2 - d/24 < T  <=>  |alpha|^2/2 < T + d/24 - n
            part = _pairing_sum(tab, poly, T + shift - n)
            total = total + part.shift(n - shift).truncate(T)
        n += 1
    return total


# -- presets and spec files -----------------------------------------------------------------


def preset_dir() -> Path:
    env = os.environ.get("VOATRACE_PRESETS")
    if env:
        return Path(env)
    return Path(__file__).parent / "presets"


def lattice_from_spec(spec: Mapping) -> Lattice:
    if "gram" not in spec:
        raise BadGram("lattice spec needs a 'gram' field")
    return Lattice(spec["gram"], name=spec.get("name", ""), embedding=spec.get("embedding"), cosets=spec.get("cosets"))


@lru_cache(maxsize=None)
def _load_path(path: str, mtime: float) -> Lattice:
    with open(path) as fh:
        return lattice_from_spec(json.load(fh))


def load_preset(name: str) -> Lattice:
    """Load ``<preset dir>/<name>.json`` (e.g. ``a1`` or ``e8``)."""
    path = preset_dir() / f"{name.lower()}.json"
    return _load_path(str(path), path.stat().st_mtime)


def harmonic_from_spec(spec: Mapping, rank: int) -> HarmonicPoly:
    """``{"poly": "..."}`` or ``{"isotropic": {"t": [...], "k": int}}``."""
    if "poly" in spec:
        return HarmonicPoly(parse_poly(spec["poly"], rank))
    if "isotropic" in spec:
        iso = spec["isotropic"]
        t = [parse_gaussian(str(x)) for x in iso["t"]]
        if len(t) != rank:
            raise ValueError(f"isotropic vector has length {len(t)}, expected {rank}")
        return isotropic_power(t, int(iso["k"]))
    raise ValueError("harmonic spec needs 'poly' or 'isotropic'")
