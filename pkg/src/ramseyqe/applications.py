"""Decision procedures built on Ramsey quantifier elimination.

* monadic decomposability: phi is decomposable iff for no variable x the
  relation "x and x' are distinguished by some valuation of the others" has
  an infinite clique;
* well-quasi-orders: reflexivity, transitivity and the absence of an infinite
  bad sequence, i.e. an infinite clique of the negated relation;
* linear liveness and termination conditions, which are plain formula
  builders around ``eliminate``.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .elim import eliminate, infer_domain
from .errors import SortError
from .formula import (ExistsRamsey, Formula, FreshNames, conj, count_atoms, count_vars, disj,
                      eq, exists, free_vars, has_ramsey, lt, neg, rename)
from .solver import SolverConfig, Status, Verdict, check_sat
from .terms import LinTerm, Sort, SortedVar


def _by_name(vs) -> list[SortedVar]:
    return sorted(vs, key=lambda v: v.name)


def _check_tuples(xs: Sequence[SortedVar], ys: Sequence[SortedVar]) -> None:
    if len(xs) != len(ys):
        raise SortError("tuples differ in length")
    for x, y in zip(xs, ys):
        if x.sort is not y.sort:
            raise SortError(f"{x.name} and {y.name} have different sorts")


def iff(a: Formula, b: Formula) -> Formula:
    return conj(disj(neg(a), b), disj(neg(b), a))


# -- monadic decomposability ----------------------------------------------------


class MondecStatus(enum.Enum):
    DECOMPOSABLE = "decomposable"
    NOT_DECOMPOSABLE = "not-decomposable"
    UNKNOWN = "unknown"


@dataclass
class MondecQuery:
    """One Ramsey query of a mondec check with its sizes and timings."""

    index: int
    variables: tuple[SortedVar, ...]
    input_vars: int
    input_atoms: int
    output_vars: int = 0
    output_atoms: int = 0
    eliminate_time: float = 0.0
    solve_time: float = 0.0
    verdict: Verdict | None = None


@dataclass
class MondecResult:
    status: MondecStatus
    index: int | None = None
    variable: SortedVar | None = None
    reason: str | None = None
    queries: list[MondecQuery] = field(default_factory=list)

    @property
    def decomposable(self) -> bool | None:
        if self.status is MondecStatus.UNKNOWN:
            return None
        return self.status is MondecStatus.DECOMPOSABLE

    def __str__(self) -> str:
        if self.status is MondecStatus.NOT_DECOMPOSABLE:
            return f"not decomposable (variable {self.variable.name})"
        if self.status is MondecStatus.UNKNOWN:
            return f"unknown (variable {self.variable.name}: {self.reason})"
        return "decomposable"


MONDEC_MODES = ("per-var", "group")


def distinguishing_formula(f: Formula, group: Sequence[SortedVar], variables: Sequence[SortedVar],
                           names: FreshNames | None = None) -> ExistsRamsey:
    """exists-ramsey g, g': exists rest: not (f(g, rest) <-> f(g', rest)).

    Satisfiable iff infinitely many valuations of ``group`` are pairwise
    distinguished by f, i.e. f is not decomposable along group | rest.
    """
    names = names or FreshNames.for_formulas(f)
    rest = [v for v in variables if v not in set(group)]
    copies = [names.copy_of(v) for v in group]
    primed = rename(f, dict(zip(group, copies)), names)
    body = exists(rest, neg(iff(f, primed)))
    return ExistsRamsey(tuple(group), tuple(copies), body)


def _run_query(q: MondecQuery, delta: ExistsRamsey, domain: str, cfg: SolverConfig) -> MondecQuery:
    t0 = time.perf_counter()
    out = eliminate(delta, domain)
    q.eliminate_time = time.perf_counter() - t0
    q.output_vars = count_vars(out)
    q.output_atoms = count_atoms(out)
    t0 = time.perf_counter()
    q.verdict = check_sat(out, cfg)
    q.solve_time = time.perf_counter() - t0
    return q


def iter_mondec_queries(f: Formula, variables: Sequence[SortedVar] | None = None,
                        mode: str = "per-var") -> Iterator[tuple[MondecQuery, ExistsRamsey]]:
    """The Ramsey formulas a mondec check has to refute, one per variable, built lazily."""
    if has_ramsey(f):
        raise SortError("mondec expects a Ramsey-free formula")
    if mode not in MONDEC_MODES:
        raise ValueError(f"unknown mondec mode {mode!r}")
    variables = list(variables) if variables is not None else _by_name(free_vars(f))
    names = FreshNames.for_formulas(f)

    def gen():
        for i, v in enumerate(variables):
            group = [v] if mode == "per-var" else [w for w in variables if w != v]
            if not group:
                continue
            delta = distinguishing_formula(f, group, variables, names)
            yield MondecQuery(i, tuple(group), count_vars(delta), count_atoms(delta)), delta
    return gen()


def mondec_queries(f: Formula, variables: Sequence[SortedVar] | None = None,
                   mode: str = "per-var") -> list[tuple[MondecQuery, ExistsRamsey]]:
    return list(iter_mondec_queries(f, variables, mode))


def mondec_check(f: Formula, domain: str | None = None, mode: str = "per-var",
                 variables: Sequence[SortedVar] | None = None,
                 cfg: SolverConfig | None = None, workers: int = 1) -> MondecResult:
    """Decide monadic decomposability of a quantifier-free formula.

    ``mode`` is ``per-var`` (one query per variable x_i, the others
    quantified) or ``group`` (the Ramsey tuple is all variables but x_i, and
    only x_i is quantified). Both test decomposability along every partition
    {x_i} | rest, which together characterise monadic decomposability.
    With ``workers > 1`` all queries run concurrently; otherwise the check
    stops at the first satisfiable query.
    """
    cfg = cfg or SolverConfig.from_env()
    domain = domain or infer_domain(f)
    if variables is None:
        variables = _by_name(free_vars(f))
    work = iter_mondec_queries(f, variables, mode)
    done: list[MondecQuery] = []
    if workers > 1 and len(variables) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(lambda p: _run_query(p[0], p[1], domain, cfg), work))
    else:
        for q, delta in work:
            done.append(_run_query(q, delta, domain, cfg))
            if q.verdict.is_sat:
                break

    def var_of(q: MondecQuery) -> SortedVar:
        return variables[q.index]

    for q in done:
        if q.verdict.is_sat:
            return MondecResult(MondecStatus.NOT_DECOMPOSABLE, q.index, var_of(q), queries=done)
    for q in done:
        if q.verdict.status is Status.UNKNOWN:
            return MondecResult(MondecStatus.UNKNOWN, q.index, var_of(q), q.verdict.reason,
                                queries=done)
    return MondecResult(MondecStatus.DECOMPOSABLE, queries=done)


def mondec_hardness_instance(psi: Formula, sort: Sort, names: FreshNames | None = None):
    """not psi(x) or y = z for fresh y, z: decomposable iff psi is unsatisfiable."""
    names = names or FreshNames.for_formulas(psi)
    y = names.var("y", sort)
    z = names.var("z", sort)
    return disj(neg(psi), eq(LinTerm.var(y) - LinTerm.var(z))), y, z


# -- well-quasi-orders ------------------------------------------------------------


class WqoStatus(enum.Enum):
    WQO = "wqo"
    NOT_WQO = "not-wqo"
    UNKNOWN = "unknown"


WQO_REASONS = ("reflexivity", "transitivity", "badSequence")


@dataclass
class WqoResult:
    status: WqoStatus
    reason: str | None = None
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    @property
    def is_wqo(self) -> bool | None:
        if self.status is WqoStatus.UNKNOWN:
            return None
        return self.status is WqoStatus.WQO

    def __str__(self) -> str:
        if self.status is WqoStatus.WQO:
            return "wqo"
        if self.status is WqoStatus.NOT_WQO:
            return f"not wqo ({self.reason})"
        return f"unknown ({self.reason})"


def wqo_violations(f: Formula, xs: Sequence[SortedVar], ys: Sequence[SortedVar],
                   domain: str | None = None) -> dict[str, Formula]:
    """The three Ramsey-free violation formulas, keyed by reason."""
    _check_tuples(xs, ys)
    names = FreshNames.for_formulas(f)
    zs = [names.copy_of(x, "z") for x in xs]
    diag = rename(f, dict(zip(ys, xs)), names)
    f_yz = rename(f, {**dict(zip(xs, ys)), **dict(zip(ys, zs))}, names)
    f_xz = rename(f, dict(zip(ys, zs)), names)
    bad = ExistsRamsey(tuple(xs), tuple(ys), neg(f))
    return {
        "reflexivity": neg(diag),
        "transitivity": conj(f, f_yz, neg(f_xz)),
        "badSequence": eliminate(bad, domain),
    }


def wqo_check(f: Formula, xs: Sequence[SortedVar], ys: Sequence[SortedVar],
              domain: str | None = None, cfg: SolverConfig | None = None) -> WqoResult:
    """Decide whether f(xs, ys) defines a well-quasi-order."""
    cfg = cfg or SolverConfig.from_env()
    verdicts: dict[str, Verdict] = {}
    unknown = None
    for reason, g in wqo_violations(f, xs, ys, domain).items():
        v = check_sat(g, cfg)
        verdicts[reason] = v
        if v.is_sat:
            return WqoResult(WqoStatus.NOT_WQO, reason, verdicts)
        if v.status is Status.UNKNOWN and unknown is None:
            unknown = reason
    if unknown is not None:
        return WqoResult(WqoStatus.UNKNOWN, unknown, verdicts)
    return WqoResult(WqoStatus.WQO, None, verdicts)


def wqo_hardness_instance(psi: Formula, xs: Sequence[SortedVar], names: FreshNames | None = None):
    """A relation on (x, xs) pairs that is a WQO iff psi(xs) is unsatisfiable.

    Returns (phi, left tuple, right tuple).
    """
    names = names or FreshNames.for_formulas(psi)
    x = names.var("x", Sort.INT)
    y = names.var("y", Sort.INT)
    ys = [names.copy_of(v, "y") for v in xs]
    X, Y = LinTerm.var(x), LinTerm.var(y)
    psi_y = rename(psi, dict(zip(xs, ys)), names)
    phi = disj(
        conj(eq(X), eq(Y)),
        conj(lt(X), lt(Y)),
        conj(lt(-X), lt(-Y)),
        conj(lt(X), eq(Y)),
        conj(eq(X), lt(-Y), psi_y),
    )
    return phi, (x, *xs), (y, *ys)


# -- liveness and termination --------------------------------------------------------


def liveness_condition(reach: Formula, constraint: Formula, xs: Sequence[SortedVar],
                       ys: Sequence[SortedVar], zs: Sequence[SortedVar] | None = None,
                       domain: str | None = None) -> Formula:
    """exists z: exists-ramsey x, y: reach(x, y) and constraint(x, y, z), eliminated.

    Satisfiable iff some run visits the state infinitely often with every
    pair of visits related by ``constraint``. By default z is every free
    variable of the constraint outside the tuples.
    """
    _check_tuples(xs, ys)
    if zs is None:
        zs = _by_name(free_vars(constraint) - set(xs) - set(ys))
    body = conj(reach, constraint)
    return exists(zs, eliminate(ExistsRamsey(tuple(xs), tuple(ys), body), domain))


class TerminationConditions(NamedTuple):
    inductivity: Formula
    loop: Formula
    clique: Formula


def termination_conditions(R: Formula, T: Formula, xs: Sequence[SortedVar],
                           ys: Sequence[SortedVar], domain: str | None = None
                           ) -> TerminationConditions:
    """Formulas whose joint unsatisfiability proves R terminating with witness T.

    inductivity: R is not contained in T, or T;R is not contained in T;
    loop: some state has a T-successor with a T-self-loop;
    clique: T has an infinite clique.
    """
    _check_tuples(xs, ys)
    names = FreshNames.for_formulas(conj(R, T))
    zs = [names.copy_of(y, "z") for y in ys]
    r_yz = rename(R, {**dict(zip(xs, ys)), **dict(zip(ys, zs))}, names)
    t_xz = rename(T, dict(zip(ys, zs)), names)
    inductivity = disj(conj(R, neg(T)), conj(T, r_yz, neg(t_xz)))
    t_yy = rename(T, dict(zip(xs, ys)), names)
    loop = conj(T, t_yy)
    clique = eliminate(ExistsRamsey(tuple(xs), tuple(ys), T), domain)
    return TerminationConditions(inductivity, loop, clique)


def check_termination(R: Formula, T: Formula, xs, ys, domain: str | None = None,
                      cfg: SolverConfig | None = None) -> dict[str, Verdict]:
    """Solver verdicts for the three termination conditions (all unsat = proof)."""
    conds = termination_conditions(R, T, xs, ys, domain)
    return {name: check_sat(g, cfg) for name, g in conds._asdict().items()}
