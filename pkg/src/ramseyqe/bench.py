"""Benchmark families and the harness that runs them.

Two groups of families: Ramsey formulas that are eliminated and solved
(half, eq_ex, eq_free, dickson, program) and quantifier-free formulas whose
monadic decomposability is decided (imp, diagonal, cubes2d, cubes10, mixed).
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .applications import MondecStatus, iter_mondec_queries, mondec_check
from .elim import eliminate
from .formula import (ExistsRamsey, Formula, compare, conj, count_atoms, count_vars, disj,
                      exists)
from .smtlib import Script
from .solver import SolverConfig, check_sat
from .terms import LinTerm, Sort, SortedVar

RAMSEY_FAMILIES = ("half", "eq_ex", "eq_free", "dickson", "program")
MONDEC_FAMILIES = ("imp", "diagonal", "cubes2d", "cubes10", "mixed")
FAMILIES = RAMSEY_FAMILIES + MONDEC_FAMILIES

DOMAINS = {"int": "Int", "real": "Real", "mixed": "Mixed"}
_ALLOWED = {f: ("Int", "Real") for f in FAMILIES}
_ALLOWED["program"] = ("Mixed",)
_ALLOWED["mixed"] = ("Mixed",)
DEFAULT_PARAM = {"half": 0, "imp": 4, "diagonal": 3, "cubes2d": 5, "mixed": 3}


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class BenchSpec:
    family: str
    dim: int = 1
    param: int | None = None
    domain: str = "Int"
    mode: str = "group"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BenchError(f"unknown family {self.family!r}")
        dom = DOMAINS.get(self.domain.lower())
        if dom is None:
            raise BenchError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "domain", dom)
        if dom not in _ALLOWED[self.family]:
            raise BenchError(f"family {self.family} is not defined over {dom}")
        if self.dim < 1:
            raise BenchError("dimension must be positive")
        if self.family == "cubes2d" and self.dim != 2:
            raise BenchError("cubes2d has dimension 2")
        if self.param is None and self.family in DEFAULT_PARAM:
            object.__setattr__(self, "param", DEFAULT_PARAM[self.family])
        if self.family in ("imp", "diagonal", "cubes2d", "mixed") and self.param < 0:
            raise BenchError(f"parameter of {self.family} must be a natural number")

    @property
    def is_mondec(self) -> bool:
        return self.family in MONDEC_FAMILIES

    @property
    def elim_domain(self) -> str:
        return self.domain.lower()


@dataclass
class BenchReport:
    family: str
    dim: int
    param: int | None
    domain: str
    input_vars: int = 0
    input_atoms: int = 0
    output_vars: int = 0
    output_atoms: int = 0
    eliminate_time: float = 0.0
    solve_time: float = 0.0
    verdict: str = "error"
    expected: str | None = None
    error: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def matches(self) -> bool | None:
        if self.expected is None:
            return None
        return self.verdict == self.expected


# -- formula builders ---------------------------------------------------------


def _v(x: SortedVar) -> LinTerm:
    return LinTerm.var(x)


def _c(n) -> LinTerm:
    return LinTerm.constant(n)


def _vec(name: str, d: int, sort: Sort) -> list[SortedVar]:
    return [SortedVar(f"{name}{i}", sort) for i in range(1, d + 1)]


def _cmp(rel: str, a: LinTerm, b: LinTerm) -> Formula:
    return compare(rel, a, b)


def _all(rel: str, xs, ys) -> Formula:
    return conj(_cmp(rel, a, b) for a, b in zip(xs, ys))


def _any(rel: str, xs, ys) -> Formula:
    return disj(_cmp(rel, a, b) for a, b in zip(xs, ys))


def generate_benchmark(spec: BenchSpec) -> Script:
    """Instantiate a family. Ramsey families give a Ramsey goal; mondec
    families give the quantifier-free formula with a ``mondec-mode`` marker."""
    d, k = spec.dim, spec.param
    sort = Sort.REAL if spec.domain == "Real" else Sort.INT
    meta = {"family": spec.family}
    fam = spec.family

    if fam in ("half", "eq_ex", "eq_free", "dickson"):
        xs, ys = _vec("x", d, sort), _vec("y", d, sort)
        X, Y = [_v(x) for x in xs], [_v(y) for y in ys]
        decls: tuple = ()
        if fam == "half":
            body = conj(_all("<=", [y.scale(2) for y in Y], X),
                        _all(">=", X, [_c(k)] * d))
        elif fam == "dickson":
            zero = [_c(0)] * d
            body = conj(_all(">=", X, zero),
                        disj(conj(_all(">=", X, Y), _any(">", X, Y)),
                             conj(_any(">", X, Y), _any(">", Y, X))))
        else:
            zs = _vec("z", d, sort)
            body = conj(_all("<", X, Y), _all("=", X, [_v(z) for z in zs]))
            if fam == "eq_ex":
                body = exists(zs, body)
            else:
                decls = tuple(zs)
        return Script(None, decls, ExistsRamsey(tuple(xs), tuple(ys), body), meta)

    if fam == "program":
        x1, x2 = _vec("x1_", d, Sort.REAL), _vec("x2_", d, Sort.INT)
        y1, y2 = _vec("y1_", d, Sort.REAL), _vec("y2_", d, Sort.INT)
        zero = [_c(0)] * d
        half = Fraction(1, 2)
        body = conj(
            _all(">", [_v(x) for x in x1], zero),
            _all(">", [_v(x) for x in x2], zero),
            _all(">=", [_v(y) for y in y1], [_v(x).scale(half) + half for x in x1]),
            _all("<=", [_v(y) for y in y2],
                 [_v(b) - LinTerm.floor(_v(a)) for a, b in zip(x1, x2)]),
        )
        return Script(None, (), ExistsRamsey(tuple(x1 + x2), tuple(y1 + y2), body), meta)

    meta["mondec-mode"] = spec.mode
    if fam == "imp":
        xs, ys = _vec("x", d, sort), _vec("y", d, sort)
        goal = conj(
            disj(_cmp("<", _v(x), _c(0)),
                 conj(_cmp(">=", _v(x) + _v(y), _c(k)), _cmp(">=", _v(y), _c(0))))
            for x, y in zip(xs, ys))
        decls = tuple(xs + ys)
    elif fam == "diagonal":
        xs = _vec("x", d, sort)
        goal = conj(_all(">=", [_v(x) for x in xs], [_c(0)] * d),
                    _all("<=", [_v(x) for x in xs], [_c(k)] * d),
                    conj(_cmp("=", _v(a), _v(b)) for a, b in zip(xs, xs[1:])))
        decls = tuple(xs)
    elif fam == "cubes2d":
        xs = _vec("x", 2, sort)
        a, b = (_v(x) for x in xs)
        cubes = [conj(_cmp("<=", _c(i), a), _cmp("<=", a, _c(i + 2)),
                      _cmp("<=", _c(i), b), _cmp("<=", b, _c(i + 2)))
                 for i in range(1, k + 1)]
        goal = conj(_cmp("<=", a + b, _c(k)), disj(cubes))
        decls = tuple(xs)
    elif fam == "cubes10":
        xs = _vec("x", d, sort)
        goal = conj(conj(_cmp("<=", _c(i), _v(x)), _cmp("<=", _v(x), _c(i + 2)))
                    for i in range(1, 11) for x in xs)
        decls = tuple(xs)
    else:  # mixed
        xs, ys = _vec("x", d, Sort.INT), _vec("y", d, Sort.REAL)
        goal = conj(conj(_cmp("=", _v(x), LinTerm.floor(_v(y))),
                         _cmp("<=", _c(0), _v(y)), _cmp("<=", _v(y), _c(k)))
                    for x, y in zip(xs, ys))
        decls = tuple(xs + ys)
    return Script(None, decls, goal, meta)


def expected_verdict(spec: BenchSpec) -> str | None:
    """The verdict reported for the family in the original experiments."""
    fam, dom = spec.family, spec.domain
    if fam == "half":
        return "sat" if dom == "Real" and spec.param <= 0 else "unsat"
    if fam in ("eq_ex", "program"):
        return "sat"
    if fam == "eq_free":
        return "unsat"
    if fam == "dickson":
        return "sat" if dom == "Real" else "unsat"
    if fam in ("cubes10", "mixed"):
        return MondecStatus.DECOMPOSABLE.value
    return (MondecStatus.DECOMPOSABLE if dom == "Int" else MondecStatus.NOT_DECOMPOSABLE).value


# -- running ----------------------------------------------------------------------


def size_of(spec: BenchSpec) -> tuple[int, int, int, int, float]:
    """Input and output counts plus elimination time, without solving.

    For mondec families the measured formula is the first Ramsey query.
    """
    script = generate_benchmark(spec)
    if spec.is_mondec:
        first = next(iter_mondec_queries(script.goal, script.declarations, spec.mode), None)
        if first is None:
            first = next(iter_mondec_queries(script.goal, script.declarations, "per-var"))
        g = first[1]
    else:
        g = script.goal
    t0 = time.perf_counter()
    out = eliminate(g, spec.elim_domain)
    dt = time.perf_counter() - t0
    return count_vars(g), count_atoms(g), count_vars(out), count_atoms(out), dt


def run_benchmark(spec: BenchSpec, cfg: SolverConfig | None = None) -> BenchReport:
    cfg = cfg or SolverConfig.from_env()
    rep = BenchReport(spec.family, spec.dim, spec.param, spec.domain,
                      expected=expected_verdict(spec))
    try:
        script = generate_benchmark(spec)
        if spec.is_mondec:
            res = mondec_check(script.goal, spec.elim_domain, spec.mode,
                               variables=script.declarations, cfg=cfg)
            if res.queries:
                first = res.queries[0]
                rep.input_vars, rep.input_atoms = first.input_vars, first.input_atoms
                rep.output_vars, rep.output_atoms = first.output_vars, first.output_atoms
            rep.eliminate_time = sum(q.eliminate_time for q in res.queries)
            rep.solve_time = sum(q.solve_time for q in res.queries)
            rep.verdict = res.status.value
            rep.extra["queries"] = len(res.queries)
            if res.variable is not None:
                rep.extra["variable"] = res.variable.name
        else:
            g = script.goal
            rep.input_vars, rep.input_atoms = count_vars(g), count_atoms(g)
            t0 = time.perf_counter()
            out = eliminate(g, spec.elim_domain)
            rep.eliminate_time = time.perf_counter() - t0
            rep.output_vars, rep.output_atoms = count_vars(out), count_atoms(out)
            t0 = time.perf_counter()
            v = check_sat(out, cfg)
            rep.solve_time = time.perf_counter() - t0
            rep.verdict = v.status.value
            if v.reason:
                rep.extra["reason"] = v.reason
    except Exception as exc:  # isolate per-spec failures
        rep.verdict = "error"
        rep.error = f"{type(exc).__name__}: {exc}"
    return rep


def run_suite(specs, cfg: SolverConfig | None = None, workers: int = 1) -> list[BenchReport]:
    """Run every spec; reports come back in spec order."""
    specs = list(specs)
    if not specs:
        return []
    cfg = cfg or SolverConfig.from_env()
    if workers <= 1:
        return [run_benchmark(s, cfg) for s in specs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run_benchmark(s, cfg), specs))


_COLUMNS = ("family", "domain", "dim", "param", "verdict", "expected", "in_vars", "in_atoms",
            "out_vars", "out_atoms", "t_elim", "t_solve")


def render_table(reports) -> str:
    rows = [_COLUMNS]
    for r in reports:
        rows.append((r.family, r.domain, str(r.dim), "-" if r.param is None else str(r.param),
                     r.verdict, r.expected or "-", str(r.input_vars), str(r.input_atoms),
                     str(r.output_vars), str(r.output_atoms), f"{r.eliminate_time:.2f}s",
                     f"{r.solve_time:.2f}s"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(_COLUMNS))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def reports_to_json(reports) -> str:
    return json.dumps([asdict(r) for r in reports], indent=2)
