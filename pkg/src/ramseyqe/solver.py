"""Subprocess bridge to an SMT-LIB 2 solver (z3 by default).

Every query is a fresh solver process fed over stdin. Sat models are read
back with ``get-value`` and re-checked against the formula before they are
returned.
"""

from __future__ import annotations

import enum
import logging
import os
import shutil
import subprocess
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import SolverError, UnsupportedFormula
from .formula import (Formula, FreshNames, conj, disj, evaluate, free_vars, has_ramsey,
                      lt, substitute)
from .lift import hoist_existentials
from .smtlib import Script, _sym, infer_logic, parse_sexpr_value, print_smtlib2
from .terms import LinTerm, Sort, SortedVar

log = logging.getLogger(__name__)

SOLVER_ENV = "RAMSEY_SOLVER"


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    model: Mapping[SortedVar, Fraction] | None = None
    reason: str | None = None

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def is_unsat(self) -> bool:
        return self.status is Status.UNSAT

    def __str__(self) -> str:
        if self.status is Status.UNKNOWN and self.reason:
            return f"unknown ({self.reason})"
        return self.status.value


@dataclass(frozen=True)
class SolverConfig:
    executable: str = "z3"
    args: tuple[str, ...] | None = None
    timeout_ms: int = 60_000
    logic: str | None = None

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("solver timeout must be positive")

    @classmethod
    def from_env(cls, **kw) -> "SolverConfig":
        exe = os.environ.get(SOLVER_ENV)
        if exe and "executable" not in kw:
            kw["executable"] = exe
        return cls(**kw)

    def command(self) -> list[str]:
        exe = shutil.which(self.executable) or self.executable
        if self.args is not None:
            return [exe, *self.args]
        base = os.path.basename(self.executable)
        if base.startswith("z3"):
            return [exe, "-in", "-smt2"]
        if base.startswith("cvc"):
            return [exe, "--lang=smt2", "--produce-models", "--incremental"]
        return [exe]


def _value(sx) -> Fraction:
    if isinstance(sx, str):
        return Fraction(sx)
    if not sx:
        raise SolverError("empty value in solver model")
    head = sx[0]
    if head == "-" and len(sx) == 2:
        return -_value(sx[1])
    if head == "/" and len(sx) == 3:
        return _value(sx[1]) / _value(sx[2])
    if head == "to_real" and len(sx) == 2:
        return _value(sx[1])
    raise SolverError(f"cannot read model value {sx!r}")


def _parse_values(text: str, by_name: Mapping[str, SortedVar]) -> dict[SortedVar, Fraction]:
    model: dict[SortedVar, Fraction] = {}
    for block in parse_sexpr_value(text):
        if not isinstance(block, list):
            continue
        for pair in block:
            if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
                raise SolverError(f"malformed get-value answer: {pair!r}")
            name = pair[0]
            if name not in by_name:
                continue
            model[by_name[name]] = _value(pair[1])
    return model


def prepare(f: Formula) -> tuple[list[SortedVar], Formula]:
    """Split ``f`` into the constants to declare and a quantifier-free goal."""
    if has_ramsey(f):
        raise UnsupportedFormula("eliminate Ramsey quantifiers before calling the solver")
    names = FreshNames.for_formulas(f)
    ws, qf = hoist_existentials(f, names)
    fv = sorted(free_vars(f), key=lambda v: v.name)
    return fv + [w for w in ws if w not in set(fv)], qf


def check_sat(f: Formula, cfg: SolverConfig | None = None) -> Verdict:
    """Decide satisfiability of an existential LIRA formula."""
    cfg = cfg or SolverConfig.from_env()
    decls, qf = prepare(f)
    logic = cfg.logic or infer_logic(qf, decls)
    text = print_smtlib2(Script(logic, tuple(decls), qf))
    if decls:
        text += "(get-value (" + " ".join(_sym(v.name) for v in decls) + "))\n"
    text += "(exit)\n"
    try:
        proc = subprocess.run(cfg.command(), input=text, capture_output=True, text=True,
                              timeout=cfg.timeout_ms / 1000)
    except subprocess.TimeoutExpired:
        return Verdict(Status.UNKNOWN, reason="timeout")
    except FileNotFoundError:
        raise SolverError(f"solver executable not found: {cfg.executable}") from None
    except OSError as exc:
        raise SolverError(f"cannot run solver: {exc}") from None
    out = proc.stdout.lstrip()
    first, _, rest = out.partition("\n")
    first = first.strip()
    if first == "unsat":
        return Verdict(Status.UNSAT)
    if first == "unknown":
        return Verdict(Status.UNKNOWN, reason="solver returned unknown")
    if first != "sat":
        msg = (proc.stderr or proc.stdout or "").strip().splitlines()
        detail = msg[0] if msg else f"exit code {proc.returncode}"
        raise SolverError(f"unexpected solver output: {detail}")
    by_name = {v.name: v for v in decls}
    model = _parse_values(rest, by_name)
    missing = [v.name for v in decls if v not in model]
    if missing:
        raise SolverError(f"solver model misses values for {', '.join(missing[:5])}")
    for v in decls:
        if v.sort is Sort.INT and model[v].denominator != 1:
            raise SolverError(f"solver assigned non-integer {model[v]} to Int {v.name}")
    if not evaluate(qf, model):
        raise SolverError("solver model does not satisfy the formula")
    return Verdict(Status.SAT, model=model)


def find_k_clique(body: Formula, xs, ys, params: Mapping[SortedVar, Fraction], k: int,
                  cfg: SolverConfig | None = None) -> Verdict:
    """Look for k pairwise distinct tuples a_1..a_k with body(a_i, a_j), i < j.

    ``params`` fixes values of free variables other than xs/ys.
    """
    xs = tuple(xs)
    ys = tuple(ys)
    pm = {v: LinTerm.constant(c) for v, c in params.items()}
    base = substitute(body, pm) if pm else body
    names = FreshNames.for_formulas(base)
    copies = [[names.copy_of(x, f"c{i}") for x in xs] for i in range(k)]
    parts = []
    for i in range(k):
        for j in range(i + 1, k):
            m = {x: LinTerm.var(c) for x, c in zip(xs, copies[i])}
            m.update({y: LinTerm.var(c) for y, c in zip(ys, copies[j])})
            parts.append(substitute(base, m, names))
            parts.append(disj(
                disj(lt(LinTerm.var(a) - LinTerm.var(b)), lt(LinTerm.var(b) - LinTerm.var(a)))
                for a, b in zip(copies[i], copies[j])))
    return check_sat(conj(parts), cfg)
