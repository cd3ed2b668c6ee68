"""Command-line interface: ``voatrace trace|theta|eisenstein|verify``.

Exit status is 0 on success, 1 when a verification suite has failures and 2
on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .fock import BracketMonomial, round_to_bracket
from .lattice import (
    LevelUnavailable,
    harmonic_from_spec,
    lattice_trace,
    lattice_trace_qm,
    theta_harmonic,
    theta_pairing,
    theta_weighted,
)
from .modforms import QuasiModular, eisenstein, eta_power, qm_to_series, reduce_e2k
from .parsing import parse_lattice_spec, parse_state_expr
from .qseries import GaussianRational, parse_gaussian, parse_rational
from .verify import E8_BRUTE_FORCE_LIMIT, run_suite
from .zhu import reduce_boson_trace

__all__ = ["main", "cmd_run", "build_parser"]


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voatrace", description="Exact trace functions of free boson and lattice VOAs.")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="trace function Z(v, q) of a monomial state")
    src = tr.add_mutually_exclusive_group(required=True)
    src.add_argument("--boson", action="store_true", help="use the rank-d free boson M(1)")
    src.add_argument("--lattice", metavar="SPEC", help="lattice preset name, JSON file, or JSON text")
    tr.add_argument("-d", "--rank", type=int, help="rank for --boson")
    tr.add_argument("--coset", type=int, default=0, help="coset index in L°/L (default 0)")
    tr.add_argument("--state", required=True, help='state such as "h1[-1]^2 h2[-2] vac"')
    tr.add_argument("--mode", choices=("auto", "bracket", "round"), default="auto")
    tr.add_argument("--order", required=True, help="truncation T (rational)")
    tr.add_argument("--format", choices=("text", "json"), default="text")

    th = sub.add_parser("theta", help="theta series of a lattice coset, optionally weighted")
    th.add_argument("--lattice", required=True, metavar="SPEC")
    th.add_argument("--coset", type=int, default=0)
    weight = th.add_mutually_exclusive_group()
    weight.add_argument("--harmonic", metavar="SPEC", help='polynomial text, or JSON {"poly": ...} / {"isotropic": ...}')
    weight.add_argument("--weight-vector", metavar="CSV", help="vector a in orthonormal coordinates; weight (a, alpha)^k")
    th.add_argument("--k", type=int, help="power for --weight-vector")
    th.add_argument("--order", required=True)
    th.add_argument("--format", choices=("text", "json"), default="text")

    es = sub.add_parser("eisenstein", help="Eisenstein series E_2k")
    es.add_argument("--weight", type=int, required=True, help="even weight 2k >= 2")
    es.add_argument("--order", required=True)
    es.add_argument("--format", choices=("text", "json"), default="text")

    ve = sub.add_parser("verify", help="run an oracle-equivalence suite")
    ve.add_argument("--suite", required=True, choices=("boson", "lattice", "lemmas", "e2-transform", "waldspurger"))
    ve.add_argument("--max-weight", type=int)
    ve.add_argument("--order", help="override the suite's truncation")
    ve.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _order(text: str) -> Fraction:
    try:
        T = parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--order must be a rational number, got {text!r}") from None
    if T <= 0:
        raise UsageError("--order must be positive")
    return T


def _emit(out, fmt: str, payload: dict, lines: list[str]):
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def _harmonic(spec: str, rank: int):
    text = spec.strip()
    path = Path(text)
    if not text.startswith("{") and path.suffix == ".json" and path.is_file():
        text = path.read_text()
    data = json.loads(text) if text.startswith("{") else {"poly": text}
    return harmonic_from_spec(data, rank)


def _cmd_trace(args, out) -> int:
    T = _order(args.order)
    if args.boson:
        if args.rank is None or args.rank < 1:
            raise UsageError("--boson needs -d <rank> with rank >= 1")
        d = args.rank
        L = None
    else:
        L = parse_lattice_spec(args.lattice)
        d = L.rank
    expr = parse_state_expr(args.state, d, args.mode)
    payload = {"command": "trace", "state": expr.render(), "rank": d, "order": str(T)}
    f = None
    note = ""
    if L is None:
        combo = _bracket_combination(expr.parsed)
        f = QuasiModular()
        for m, c in combo.items():
            f = f + reduce_boson_trace(m).f * c
        series = qm_to_series(f, T + Fraction(d, 24)) * eta_power(-d, T)
        series = series.truncate(T)
        payload["space"] = f"M(1) rank {d}"
    else:
        coset = L.coset(args.coset)
        series = lattice_trace(expr.parsed, L, coset, T)
        payload["space"] = f"V_L {L.name or 'lattice'} coset {args.coset}"
        if args.coset == 0:
            try:
                f = lattice_trace_qm(expr.parsed, L)
            except (LevelUnavailable, ValueError) as exc:
                note = str(exc)
        else:
            note = "modular decomposition is only computed for the lattice itself (coset 0)"
    payload["series"] = series.to_records()
    payload["f"] = f.to_records() if f is not None else None
    payload["identity"] = f"Z = f/eta^{d}" if f is not None else None
    lines = [f"state: {expr.render()}", f"Z(v, q) = {series}"]
    if f is not None:
        lines += [f"f = {f}", f"Z = f/eta^{d}"]
    elif note:
        lines.append(f"f unavailable: {note}")
        payload["note"] = note
    _emit(out, args.format, payload, lines)
    return 0


def _bracket_combination(parsed) -> dict:
    if isinstance(parsed, BracketMonomial):
        return {parsed: GaussianRational(1)}
    return round_to_bracket(parsed)


def _cmd_theta(args, out) -> int:
    T = _order(args.order)
    L = parse_lattice_spec(args.lattice)
    coset = L.coset(args.coset)
    payload = {"command": "theta", "lattice": L.name, "coset": args.coset, "order": str(T)}
    if args.harmonic is not None:
        if args.k is not None:
            raise UsageError("--k only applies to --weight-vector")
        P = _harmonic(args.harmonic, L.rank)
        series = theta_harmonic(L, P, T, coset)
        payload["weight"] = str(P.poly)
    elif args.weight_vector is not None:
        if args.k is None or args.k < 0:
            raise UsageError("--weight-vector needs --k <int> with k >= 0")
        a = [parse_gaussian(x.strip()) for x in args.weight_vector.split(",")]
        if len(a) != L.rank:
            raise UsageError(f"--weight-vector has {len(a)} entries, lattice rank is {L.rank}")
        series = theta_weighted(L, coset, a, args.k, T)
        payload["weight"] = {"vector": [x.to_record() for x in a], "k": args.k}
    else:
        if args.k is not None:
            raise UsageError("--k only applies to --weight-vector")
        series = theta_pairing(L, coset, (0,) * L.rank, T)
        payload["weight"] = None
    payload["series"] = series.to_records()
    _emit(out, args.format, payload, [f"theta = {series}"])
    return 0


def _cmd_eisenstein(args, out) -> int:
    T = _order(args.order)
    if args.weight < 2 or args.weight % 2:
        raise UsageError("--weight must be an even integer >= 2")
    series = eisenstein(args.weight, T)
    payload = {"command": "eisenstein", "weight": args.weight, "order": str(T), "series": series.to_records()}
    lines = [f"E{args.weight} = {series}"]
    if args.weight >= 4:
        qm = reduce_e2k(args.weight)
        payload["rewriting"] = qm.to_records()
        lines.append(f"E{args.weight} = {qm}")
    _emit(out, args.format, payload, lines)
    return 0


def _cmd_verify(args, out) -> int:
    order = _order(args.order) if args.order is not None else None
    if args.suite == "lattice" and order is not None and order > E8_BRUTE_FORCE_LIMIT:
        raise UsageError(
            f"refusing T = {order} for the E8 brute-force suite (limit {E8_BRUTE_FORCE_LIMIT}); "
            "the oscillator enumeration grows combinatorially"
        )
    if args.max_weight is not None and args.max_weight < 0:
        raise UsageError("--max-weight must be non-negative")
    results = run_suite(args.suite, max_weight=args.max_weight, order=order)
    failed = [r for r in results if not r.passed]
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f"  ({r.detail})" if not r.passed and r.detail else "") for r in results]
    lines.append(f"{args.suite}: {len(results) - len(failed)}/{len(results)} passed")
    payload = {
        "command": "verify",
        "suite": args.suite,
        "cases": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
        "passed": len(results) - len(failed),
        "failed": len(failed),
    }
    _emit(out, args.format, payload, lines)
    return 1 if failed else 0


_COMMANDS = {"trace": _cmd_trace, "theta": _cmd_theta, "eisenstein": _cmd_eisenstein, "verify": _cmd_verify}


def cmd_run(argv, out=None, err=None) -> int:
    """Run one command; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"voatrace: error: {exc}\n")
        return 2
    except (ValueError, ArithmeticError, OSError, SyntaxError, KeyError) as exc:
        err.write(f"voatrace: error: {type(exc).__name__}: {exc}\n")
        return 2


def main(argv=None) -> int:
    return cmd_run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
