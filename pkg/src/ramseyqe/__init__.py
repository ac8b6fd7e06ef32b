"""Ramsey quantifier elimination for linear integer, real and mixed arithmetic."""

from .applications import (check_termination, liveness_condition, mondec_check,
                           termination_conditions, wqo_check)
from .decompose import flatten_atoms, separate
from .elim import (eliminate, eliminate_ramsey, eliminate_ramsey_int, eliminate_ramsey_mixed,
                   eliminate_ramsey_real)
from .errors import ParseError, RamseyError, SolverError, SortError, UnsupportedFormula
from .formula import (And, Atom, AtomKind, Exists, ExistsRamsey, Formula, Not, Or, TermAtom,
                      evaluate, free_vars, substitute)
from .lift import lift_inner_existentials
from .normalize import build_selector_skeleton, canonize, nnf_positive
from .smtlib import Script, parse_formula, parse_script, print_smtlib2
from .solver import SolverConfig, Status, Verdict, check_sat, find_k_clique
from .terms import LinTerm, Sort, SortedVar

__version__ = "0.1.0"
