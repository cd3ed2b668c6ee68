"""Exact q-expansions of trace functions for free boson and lattice vertex operator algebras."""

from .fock import BracketMonomial, FockVector, bracket_to_round, brute_force_Z, round_to_bracket
from .lattice import (
    HarmonicPoly,
    Lattice,
    brute_force_lattice_Z,
    isotropic_power,
    lattice_trace,
    lattice_trace_qm,
    load_preset,
    primary_state,
    theta_harmonic,
    theta_weighted,
)
from .modforms import E2, E4, E6, QuasiModular, eisenstein, eta_power, qm_from_series, qm_to_series, reduce_e2k
from .parsing import parse_lattice_spec, parse_state_expr
from .poly import Poly, parse_poly
from .qseries import GaussianRational, QSeries
from .zhu import reduce_boson_trace, reduce_pairing_trace

__version__ = "0.1.0"

__all__ = [
    "BracketMonomial",
    "FockVector",
    "bracket_to_round",
    "round_to_bracket",
    "brute_force_Z",
    "HarmonicPoly",
    "Lattice",
    "brute_force_lattice_Z",
    "isotropic_power",
    "lattice_trace",
    "lattice_trace_qm",
    "load_preset",
    "primary_state",
    "theta_harmonic",
    "theta_weighted",
    "E2",
    "E4",
    "E6",
    "QuasiModular",
    "eisenstein",
    "eta_power",
    "qm_from_series",
    "qm_to_series",
    "reduce_e2k",
    "parse_lattice_spec",
    "parse_state_expr",
    "Poly",
    "parse_poly",
    "GaussianRational",
    "QSeries",
    "reduce_boson_trace",
    "reduce_pairing_trace",
]
