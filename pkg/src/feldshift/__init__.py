"""Feldman-word subshifts: construction words, the f-bar metric and exact counting checks."""
from .params import ParamError, ParamSeq, PRule, validate, gamma, gamma_by_recurrence
from .words import (CapExceeded, Tower, tower, build_feldman, build_extended, build_c,
                    length_L, symbol_at, extract, materialize, orbit_prefix, min_gap)
from . import fbar
from .fbar import fbar_words, gerber_check, lb_test
from .analysis import (complexity_brute, complexity_report, complexity_structural,
                       right_special, in_double_bracket, DoubleBracket, frequency,
                       interior_multiplicity, asequal_gap)

__version__ = "0.1.0"
