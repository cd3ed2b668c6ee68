"""State and lattice parsing, and the command-line surface."""

import io
import json
import random

import pytest

from voatrace.cli import cmd_run
from voatrace.fock import BracketMonomial, FockVector, make_state
from voatrace.lattice import BadEmbedding, BadGram, preset_dir
from voatrace.parsing import (
    ModeError,
    RankError,
    StateSyntaxError,
    parse_lattice_spec,
    parse_state_expr,
    render_state,
)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cmd_run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def random_expr(rnd, d, mode):
    opn, cls = ("[", "]") if mode == "bracket" else ("(", ")")
    parts = []
    for _ in range(rnd.randint(0, 5)):
        ident = "a" if rnd.random() < 0.15 else f"h{rnd.randint(1, d)}"
        term = f"{ident}{opn}-{rnd.randint(1, 4)}{cls}"
        if rnd.random() < 0.3:
            term += f"^{rnd.randint(1, 3)}"
        parts.append(term)
    return " " * rnd.randint(0, 2) + (" " * rnd.randint(1, 2)).join(parts + ["vac"])


class TestParseState:
    def test_example(self):
        e = parse_state_expr("h1[-1]^2 h2[-2] vac", 2)
        assert e.parsed == BracketMonomial([(1, 1), (1, 1), (2, 2)], 2)

    def test_vacuum(self):
        assert parse_state_expr("vac", 1).parsed == BracketMonomial.vacuum(1)

    def test_alias(self):
        assert parse_state_expr("a[-3] vac", 1).parsed == BracketMonomial([(1, 3)], 1)

    def test_round(self):
        e = parse_state_expr("h1(-2) h1(-1)^2 vac", 1, "round")
        assert e.parsed == FockVector(1, {make_state([(1, 2), (1, 1), (1, 1)]): 1})
        assert e.render() == "h1(-2) h1(-1)^2 vac"

    def test_rank_error(self):
        with pytest.raises(RankError):
            parse_state_expr("h3[-1] vac", 2)

    @pytest.mark.parametrize("text", ["h1[0] vac", "h1[2] vac", "a(1) vac"])
    def test_mode_error(self, text):
        with pytest.raises(ModeError):
            parse_state_expr(text, 1, "auto")

    @pytest.mark.parametrize(
        "text, pos",
        [("h1[-1]", 6), ("h1[-1] vac h1[-1]", 11), ("h1[-1 vac", 0), ("x1[-1] vac", 0), ("h1(-1) vac", 2), ("h1[-1]h1[-1] vac", 6)],
    )
    def test_syntax_error(self, text, pos):
        with pytest.raises(SyntaxError) as info:
            parse_state_expr(text, 1, "bracket")
        assert isinstance(info.value, StateSyntaxError)
        assert info.value.position == pos

    @pytest.mark.parametrize("mode", ["bracket", "round"])
    def test_round_trip(self, mode):
        rnd = random.Random(2024 if mode == "bracket" else 7)
        for _ in range(100):
            d = rnd.randint(1, 3)
            text = random_expr(rnd, d, mode)
            first = parse_state_expr(text, d, mode)
            again = parse_state_expr(first.render(), d, mode)
            assert again.parsed == first.parsed
            assert again.render() == first.render()

    def test_render_groups_powers(self):
        assert render_state(BracketMonomial([(1, 1), (1, 1), (2, 3)], 2)) == "h2[-3] h1[-1]^2 vac"


class TestParseLattice:
    def test_e8_preset(self):
        L = parse_lattice_spec(preset_dir() / "e8.json")
        assert (L.rank, L.determinant, L.level) == (8, 1, 1)

    def test_preset_by_name_and_relative_path(self):
        assert parse_lattice_spec("e8").gram == parse_lattice_spec("presets/e8.json").gram

    def test_asymmetric(self):
        with pytest.raises(BadGram):
            parse_lattice_spec('{"gram": [[2, 1], [0, 2]]}')

    def test_odd(self):
        with pytest.raises(BadGram):
            parse_lattice_spec('{"gram": [[1]]}')

    def test_bad_json(self):
        with pytest.raises(BadGram):
            parse_lattice_spec('{"gram": [[2]')

    def test_embedding(self):
        with pytest.raises(BadEmbedding):
            parse_lattice_spec({"gram": [[2]], "embedding": [["1/2"]]})

    @pytest.mark.parametrize("name", ["a1", "e8"])
    def test_preset_round_trip(self, name):
        L = parse_lattice_spec(name)
        again = parse_lattice_spec(json.dumps(L.to_spec()))
        assert again.gram == L.gram
        assert again.cosets == L.cosets
        assert again.to_spec() == L.to_spec()

    def test_env_override(self, tmp_path, monkeypatch):
        (tmp_path / "tiny.json").write_text('{"name": "tiny", "gram": [[4]]}')
        monkeypatch.setenv("VOATRACE_PRESETS", str(tmp_path))
        assert parse_lattice_spec("tiny").determinant == 4


class TestTraceCommand:
    def test_boson_example(self):
        code, out, _ = run("trace", "--boson", "-d", "1", "--state", "h1[-2]^2 vac", "--order", "6")
        assert code == 0
        assert "f = -6*E4" in out
        assert "Z = f/eta^1" in out

    def test_json_deterministic(self):
        argv = ("trace", "--lattice", "e8", "--state", "h1[-1]^2 vac", "--order", "2", "--format", "json")
        first = run(*argv)
        second = run(*argv)
        assert first == second
        data = json.loads(first[1])
        assert data["f"] == [{"e2": 0, "e4": 0, "e6": 1, "re": "2520/1", "im": "0/1"}]

    def test_round_mode_state(self):
        code, out, _ = run("trace", "--boson", "-d", "1", "--state", "a(-1)^2 vac", "--order", "3")
        assert code == 0
        # a(-1)^2 1 = a[-1]^2 1 + (1/12) 1
        assert "f = 1/12 + E2" in out
        assert "2*q^(23/24) + 8*q^(47/24) + 18*q^(71/24)" in out

    def test_coset_without_decomposition(self):
        code, out, _ = run("trace", "--lattice", "a1", "--coset", "1", "--state", "vac", "--order", "2")
        assert code == 0
        assert "f unavailable" in out

    def test_rank_error_exit(self):
        code, _, err = run("trace", "--boson", "-d", "2", "--state", "h3[-1] vac", "--order", "2")
        assert code == 2
        assert "RankError" in err

    def test_missing_rank(self):
        assert run("trace", "--boson", "--state", "vac", "--order", "2")[0] == 2


class TestOtherCommands:
    def test_theta_e8(self):
        code, out, _ = run("theta", "--lattice", "presets/e8.json", "--order", "3")
        assert code == 0
        assert out.strip() == "theta = 1 + 240*q + 2160*q^2 + O(q^3)"

    def test_theta_weight_vector(self):
        code, out, _ = run("theta", "--lattice", "a1", "--weight-vector", "1", "--k", "2", "--order", "10")
        assert out.strip() == "theta = 4*q + 16*q^4 + 36*q^9 + O(q^10)"

    def test_theta_harmonic(self):
        spec = '{"isotropic": {"t": ["1", "i", "0", "0", "0", "0", "0", "0"], "k": 8}}'
        code, out, _ = run("theta", "--lattice", "e8", "--harmonic", spec, "--order", "3")
        assert code == 0
        assert "120*q - 2880*q^2" in out

    def test_theta_not_harmonic(self):
        code, _, err = run("theta", "--lattice", "e8", "--harmonic", "x1^2", "--order", "2")
        assert code == 2
        assert "NotHarmonic" in err

    def test_eisenstein(self):
        code, out, _ = run("eisenstein", "--weight", "8", "--order", "2")
        assert code == 0
        assert "3/7*E4^2" in out

    def test_eisenstein_bad_weight(self):
        assert run("eisenstein", "--weight", "5", "--order", "2")[0] == 2

    def test_verify_lemmas(self):
        code, out, _ = run("verify", "--suite", "lemmas", "--max-weight", "6")
        assert code == 0
        assert "FAIL" not in out

    def test_verify_refuses_large_order(self):
        code, _, err = run("verify", "--suite", "lattice", "--order", "41")
        assert code == 2
        assert "refusing" in err

    def test_usage_error(self):
        assert run("trace")[0] == 2
        assert run("bogus")[0] == 2
