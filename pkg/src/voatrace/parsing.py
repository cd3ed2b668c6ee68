"""Concrete syntax for Fock states and lattice spec files.

State expressions look like ``h1[-1]^2 h2[-2] vac`` (square-bracket modes) or
``h1(-1)^2 h2(-2) vac`` (round modes); ``a`` is an alias for ``h1``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .fock import BracketMonomial, FockVector, make_state
from .lattice import BadGram, Lattice, lattice_from_spec, preset_dir

__all__ = [
    "StateSyntaxError",
    "RankError",
    "ModeError",
    "StateExpr",
    "parse_state_expr",
    "render_state",
    "parse_lattice_spec",
]


class StateSyntaxError(SyntaxError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class RankError(ValueError):
    pass


class ModeError(ValueError):
    pass


_OPEN = {"bracket": "[", "round": "("}
_CLOSE = {"bracket": "]", "round": ")"}

_TERM = re.compile(
    r"(?P<ident>h(?P<dir>\d+)|a)(?P<open>[\[(])(?P<mode>[-+]?\d+)(?P<close>[\])])(?:\^(?P<exp>\d+))?"
)


@dataclass(frozen=True)
class StateExpr:
    source: str
    parsed: Union[BracketMonomial, FockVector]
    rank: int
    mode: str

    def render(self) -> str:
        return render_state(self.parsed)


def parse_state_expr(text: str, d: int, mode: str = "bracket") -> StateExpr:
    """Parse a monomial state expression of rank ``d``.

    ``mode`` is ``"bracket"``, ``"round"`` or ``"auto"`` (decided by the
    first delimiter found).
    """
    if mode == "auto":
        mode = "round" if "(" in text else "bracket"
    if mode not in _OPEN:
        raise ValueError(f"mode must be 'bracket' or 'round', got {mode!r}")
    factors: list[tuple[int, int]] = []
    pos = 0
    n = len(text)
    saw_vac = False
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        if saw_vac:
            raise StateSyntaxError("unexpected text after 'vac'", pos, text)
        if text.startswith("vac", pos) and (pos + 3 == n or not text[pos + 3].isalnum()):
            saw_vac = True
            pos += 3
            continue
        m = _TERM.match(text, pos)
        if not m:
            raise StateSyntaxError(f"expected a mode factor or 'vac', found {text[pos:pos + 8]!r}", pos, text)
        if m.group("open") != _OPEN[mode] or m.group("close") != _CLOSE[mode]:
            raise StateSyntaxError(
                f"{mode} mode expects {_OPEN[mode]}...{_CLOSE[mode]} delimiters", m.start("open"), text
            )
        direction = int(m.group("dir")) if m.group("dir") else 1
        if direction < 1 or direction > d:
            raise RankError(f"direction h{direction} at position {m.start()} exceeds rank {d}")
        mode_num = int(m.group("mode"))
        if mode_num >= 0:
            raise ModeError(f"non-negative mode {mode_num} at position {m.start('mode')}; states need creation modes")
        exp = int(m.group("exp")) if m.group("exp") is not None else 1
        factors.extend([(direction, -mode_num)] * exp)
        pos = m.end()
        if pos < n and not text[pos].isspace():
            raise StateSyntaxError("terms must be separated by whitespace", pos, text)
    if not saw_vac:
        raise StateSyntaxError("expression must end with 'vac'", n, text)
    if mode == "bracket":
        parsed: Union[BracketMonomial, FockVector] = BracketMonomial(factors, d)
    else:
        parsed = FockVector(d, {make_state(factors): 1})
    return StateExpr(text, parsed, d, mode)


def _group(factors) -> list[tuple[int, int, int]]:
    out: list[list[int]] = []
    for i, n in factors:
        if out and out[-1][0] == i and out[-1][1] == n:
            out[-1][2] += 1
        else:
            out.append([i, n, 1])
    return [tuple(x) for x in out]


def render_state(parsed) -> str:
    """Canonical text for a BracketMonomial or a single-state FockVector."""
    if isinstance(parsed, BracketMonomial):
        parts = [f"h{i}[-{n}]" + (f"^{k}" if k > 1 else "") for i, n, k in _group(parsed.factors)]
        return " ".join(parts + ["vac"])
    if isinstance(parsed, FockVector):
        if len(parsed.terms) != 1 or next(iter(parsed.terms.values())) != 1:
            raise ValueError("only single monomial states have a text form")
        state = next(iter(parsed.terms))
        parts = [f"h{i}(-{n})" + (f"^{k}" if k > 1 else "") for i, n, k in _group(state)]
        return " ".join(parts + ["vac"])
    raise TypeError(f"cannot render {type(parsed).__name__}")


def parse_lattice_spec(source) -> Lattice:
    """Load a lattice from a JSON file path, JSON text, or preset name."""
    if isinstance(source, dict):
        return _from_dict(source)
    text = str(source)
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadGram(f"invalid lattice JSON: {exc}") from None
        return _from_dict(data)
    path = Path(text)
    candidates = [path, preset_dir() / path.name, preset_dir() / f"{text.lower()}.json"]
    for p in candidates:
        if p.is_file():
            try:
                data = json.loads(p.read_text())
            except json.JSONDecodeError as exc:
                raise BadGram(f"invalid lattice JSON in {p}: {exc}") from None
            return _from_dict(data)
    raise FileNotFoundError(f"no lattice spec file or preset named {text!r}")


def _from_dict(data) -> Lattice:
    if not isinstance(data, dict):
        raise BadGram("lattice spec must be a JSON object")
    return lattice_from_spec(data)
