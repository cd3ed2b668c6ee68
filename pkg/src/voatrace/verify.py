"""Self-contained verification suites behind ``voatrace verify``.

Each suite yields ``CaseResult`` records; nothing here reads the network or
anything outside the preset directory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .fock import BracketMonomial, bracket_to_round, brute_force_Z, enum_basis
from .lattice import (
    brute_force_lattice_Z,
    isotropic_power,
    lattice_trace,
    lattice_trace_qm,
    load_preset,
    primary_state,
    theta_harmonic,
)
from .modforms import eisenstein, eta_power
from .poly import Poly
from .qseries import GaussianRational, eval_at_tau
from .zhu import closed_form_lemma1, closed_form_lemma2, reduce_boson_trace

__all__ = ["CaseResult", "SUITES", "run_suite", "E8_BRUTE_FORCE_LIMIT", "w_monomial", "triangular_system"]

E8_BRUTE_FORCE_LIMIT = 40


@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    detail: str = ""


def bracket_monomials(d: int, max_weight: int) -> list[BracketMonomial]:
    return [BracketMonomial(s, d) for n in range(max_weight + 1) for s in enum_basis(d, n)]


def w_monomial(r: int, s: int, t: int) -> BracketMonomial:
    """a[-1]^(2r) a[-2]^(2s) a[-3]^(2t) 1 in rank one."""
    return BracketMonomial([(1, 1)] * (2 * r) + [(1, 2)] * (2 * s) + [(1, 3)] * (2 * t), 1)


def _lemma3_ok(r: int, s: int, t: int) -> tuple[bool, str]:
    f = reduce_boson_trace(w_monomial(r, s, t)).f
    lead = f.terms.get((r, s, t))
    others = [k for k in f.terms if k != (r, s, t)]
    ok = bool(lead) and all(k[0] < r for k in others)
    return ok, f"f = {f}"


def triangular_system(max_index: int = 2):
    """Rows: W-monomials (r,s,t); columns: leading basis E2^r E4^s E6^t.

    Returns (keys, matrix) with keys sorted by (r, s, t).
    """
    keys = sorted((r, s, t) for r in range(max_index + 1) for s in range(max_index + 1) for t in range(max_index + 1))
    fs = {k: reduce_boson_trace(w_monomial(*k)).f for k in keys}
    matrix = [[fs[row].terms.get(col, GaussianRational(0)) for col in keys] for row in keys]
    return keys, matrix


def _is_triangular_invertible(keys, matrix) -> bool:
    for i, ki in enumerate(keys):
        if not matrix[i][i]:
            return False
        for j, kj in enumerate(keys):
            # an E2^r' term with r' >= r other than the leading one would break the order
            if i != j and matrix[i][j] and kj[0] >= ki[0]:
                return False
    return True


def suite_boson(max_weight: int | None = None, order=None) -> Iterator[CaseResult]:
    w = 6 if max_weight is None else max_weight
    for d in (1, 2):
        T = Fraction(8) - Fraction(d, 24) if order is None else Fraction(order)
        for m in bracket_monomials(d, w):
            sym = reduce_boson_trace(m).series(T)
            brute = brute_force_Z(bracket_to_round(m), T)
            yield CaseResult(f"boson d={d} {m}", sym == brute)


def suite_lemmas(max_weight: int | None = None, order=None) -> Iterator[CaseResult]:
    def fits(m: BracketMonomial) -> bool:
        return max_weight is None or m.weight <= max_weight

    for n in range(1, 5):
        for r in range(0, 4):
            m = BracketMonomial([(1, n)] * (2 * r), 1)
            if fits(m):
                got = reduce_boson_trace(m).f
                want = closed_form_lemma1(n, r)
                yield CaseResult(f"lemma1 n={n} r={r}", got == want, f"{got} vs {want}")
    for r in range(0, 4):
        for s in range(0, 4):
            m12 = BracketMonomial([(1, 1)] * (2 * r) + [(1, 2)] * (2 * s), 1)
            if fits(m12):
                got = reduce_boson_trace(m12).f
                want = closed_form_lemma2(r, s, 12)
                yield CaseResult(f"lemma2 a[-1]^{2 * r} a[-2]^{2 * s}", got == want, f"{got} vs {want}")
            m23 = BracketMonomial([(1, 2)] * (2 * r) + [(1, 3)] * (2 * s), 1)
            if fits(m23):
                got = reduce_boson_trace(m23).f
                want = closed_form_lemma2(r, s, 23)
                yield CaseResult(f"lemma2 a[-2]^{2 * r} a[-3]^{2 * s}", got == want, f"{got} vs {want}")
    for r in range(3):
        for s in range(3):
            for t in range(3):
                if fits(w_monomial(r, s, t)):
                    ok, detail = _lemma3_ok(r, s, t)
                    yield CaseResult(f"lemma3 r={r} s={s} t={t}", ok, detail)
    if max_weight is None or max_weight >= 24:
        keys, matrix = triangular_system(2)
        yield CaseResult("W-monomial system triangular and invertible", _is_triangular_invertible(keys, matrix))


def e2_anomaly_residual(tau: complex, n_terms: int = 100) -> float:
    """|E2(-1/tau) - tau^2 E2(tau) + tau/(2 pi i)| from a truncated expansion."""
    s = eisenstein(2, n_terms)
    lhs = eval_at_tau(s, -1 / tau)
    rhs = tau**2 * eval_at_tau(s, tau) - tau / (2j * math.pi)
    return abs(lhs - rhs)


def suite_e2_transform(max_weight: int | None = None, order=None) -> Iterator[CaseResult]:
    n = 100 if order is None else int(order)
    for tau in (1j, 0.5 + 1j):
        res = e2_anomaly_residual(tau, n)
        yield CaseResult(f"E2 transformation at tau={tau}", res < 1e-6, f"residual {res:.3e}")


def waldspurger_ratio(order=11):
    """(theta_E8((x1 + i x2)^8), eta^24, constant c or None)."""
    E8 = load_preset("e8")
    T = Fraction(order)
    P = isotropic_power([1, GaussianRational(0, 1)] + [0] * 6, 8)
    th = theta_harmonic(E8, P, T)
    delta = eta_power(24, T)
    c = th.coefficient(1)
    ok = bool(c) and th == delta.scale(c)
    return th, delta, (c if ok else None)


def suite_waldspurger(max_weight: int | None = None, order=None) -> Iterator[CaseResult]:
    th, _, c = waldspurger_ratio(11 if order is None else order)
    yield CaseResult("theta_E8((x1 + i x2)^8) proportional to eta^24", c is not None, f"constant {c}")


def suite_lattice(max_weight: int | None = None, order=None) -> Iterator[CaseResult]:
    T = Fraction(3) if order is None else Fraction(order)
    if T > E8_BRUTE_FORCE_LIMIT:
        raise ValueError(f"E8 brute-force suites refuse T > {E8_BRUTE_FORCE_LIMIT} (combinatorial blow-up)")
    w = 4 if max_weight is None else min(max_weight, 4)
    A1 = load_preset("a1")
    E8 = load_preset("e8")
    for m in bracket_monomials(1, w):
        for idx, c in enumerate(A1.cosets):
            ok = lattice_trace(m, A1, c, 5) == brute_force_lattice_Z(bracket_to_round(m), A1, c, 5)
            yield CaseResult(f"A1 coset {idx} {m}", ok)
    for m in bracket_monomials(8, w):
        ok = lattice_trace(m, E8, None, T) == brute_force_lattice_Z(bracket_to_round(m), E8, None, T)
        yield CaseResult(f"E8 {m}", ok)
    for m in bracket_monomials(8, w):
        if m.weight % 2 == 0:
            f = lattice_trace_qm(m, E8)
            yield CaseResult(f"E8 E2-free {m}", f.e2_degree() == 0, f"f = {f}")
    for check in theorem3_cases(T):
        yield check


def theorem3_cases(T_e8=3) -> Iterator[CaseResult]:
    A1 = load_preset("a1")
    E8 = load_preset("e8")
    for label, P in (("1", Poly.constant(1)), ("x1", Poly.var(1, 1))):
        v = primary_state(P)
        for idx, c in enumerate(A1.cosets):
            want = (theta_harmonic(A1, P, 5 + Fraction(1, 24), c) * eta_power(-1, 5)).truncate(5)
            sym = lattice_trace(v, A1, c, 5)
            brute = brute_force_lattice_Z(v, A1, c, 5)
            yield CaseResult(f"theorem3 A1 coset {idx} P={label}", sym == want and brute == want)
    i = GaussianRational(0, 1)
    T = Fraction(T_e8)
    for k in range(0, 5):
        P = isotropic_power([1, i, 0, 0, 0, 0, 0, 0], k)
        v = primary_state(P)
        want = (theta_harmonic(E8, P, T + Fraction(1, 3)) * eta_power(-8, T)).truncate(T)
        sym = lattice_trace(v, E8, None, T)
        brute = brute_force_lattice_Z(v, E8, None, T)
        yield CaseResult(f"theorem3 E8 (x1 + i x2)^{k}", sym == want and brute == want)


SUITES: dict[str, Callable[..., Iterator[CaseResult]]] = {
    "boson": suite_boson,
    "lattice": suite_lattice,
    "lemmas": suite_lemmas,
    "e2-transform": suite_e2_transform,
    "waldspurger": suite_waldspurger,
}


def run_suite(name: str, max_weight: int | None = None, order=None) -> list[CaseResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return list(SUITES[name](max_weight=max_weight, order=order))
