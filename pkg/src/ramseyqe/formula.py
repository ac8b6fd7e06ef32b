"""Formula AST: atoms, boolean connectives, existential and Ramsey binders."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import SortError, UnsupportedFormula
from .terms import LinTerm, Number, Sort, SortedVar, check_int_valued


class Formula:
    """Base class. Use the smart constructors ``conj``/``disj``/``neg``."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __invert__(self) -> "Formula":
        return neg(self)


@dataclass(frozen=True)
class BoolConst(Formula):
    value: bool

    def __repr__(self) -> str:
        return "true" if self.value else "false"


TRUE = BoolConst(True)
FALSE = BoolConst(False)


class AtomKind(enum.Enum):
    LT = "<"      # lhs < 0
    EQ = "="      # lhs = 0
    DIV = "div"   # lhs = residue (mod modulus)
    NDIV = "ndiv"  # not DIV


@dataclass(frozen=True)
class Atom(Formula):
    """A normalized atom. For congruences the lhs has no constant part."""

    kind: AtomKind
    lhs: LinTerm
    modulus: int | None = None
    residue: int = 0

    def __post_init__(self):
        if self.kind in (AtomKind.DIV, AtomKind.NDIV):
            if not isinstance(self.modulus, int) or self.modulus <= 0:
                raise SortError("congruence modulus must be a positive integer")
            if not self.lhs.is_int_valued() or self.lhs.const != 0:
                raise SortError("congruence lhs must be an integer term without constant")
            if not 0 <= self.residue < self.modulus:
                raise SortError("congruence residue out of range")
        elif self.modulus is not None:
            raise SortError("modulus only allowed on congruences")

    def __repr__(self) -> str:
        if self.kind is AtomKind.LT:
            return f"({self.lhs!r} < 0)"
        if self.kind is AtomKind.EQ:
            return f"({self.lhs!r} = 0)"
        op = "==" if self.kind is AtomKind.DIV else "=/="
        return f"({self.lhs!r} {op} {self.residue} mod {self.modulus})"


TERM_RELATIONS = ("<", "<=", ">", ">=", "=", "distinct", "cong")


@dataclass(frozen=True)
class TermAtom(Formula):
    """An un-normalized comparison ``left rel right`` as written in the input."""

    rel: str
    left: LinTerm
    right: LinTerm
    modulus: int | None = None

    def __post_init__(self):
        if self.rel not in TERM_RELATIONS:
            raise SortError(f"unknown relation {self.rel}")
        if self.rel == "cong":
            if not isinstance(self.modulus, int) or self.modulus <= 0:
                raise SortError("congruence modulus must be a positive integer")
            if not (self.left - self.right).is_int_valued():
                raise SortError("congruence over a non-integer term")

    def __repr__(self) -> str:
        if self.rel == "cong":
            return f"({self.left!r} == {self.right!r} mod {self.modulus})"
        return f"({self.left!r} {self.rel} {self.right!r})"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple[SortedVar, ...]
    body: Formula


@dataclass(frozen=True)
class ExistsRamsey(Formula):
    """There is an infinite sequence of pairwise distinct tuples a_1, a_2, ...
    with body(a_i, a_j) for all i < j."""

    xs: tuple[SortedVar, ...]
    ys: tuple[SortedVar, ...]
    body: Formula

    def __post_init__(self):
        if not self.xs:
            raise SortError("Ramsey quantifier needs at least one variable per side")
        if len(self.xs) != len(self.ys):
            raise SortError("Ramsey binder sides differ in length")
        for x, y in zip(self.xs, self.ys):
            if x.sort is not y.sort:
                raise SortError(f"Ramsey binder sort mismatch: {x.name} vs {y.name}")
        if len(set(self.xs) | set(self.ys)) != 2 * len(self.xs):
            raise SortError("Ramsey binder variables must be distinct")


# -- atom constructors ------------------------------------------------------


def _const_cmp(kind: AtomKind, c: Fraction) -> BoolConst:
    return BoolConst(c < 0 if kind is AtomKind.LT else c == 0)


def lt(t: LinTerm) -> Formula:
    """t < 0"""
    if t.is_constant():
        return BoolConst(t.const < 0)
    return Atom(AtomKind.LT, t)


def eq(t: LinTerm) -> Formula:
    """t = 0"""
    if t.is_constant():
        return BoolConst(t.const == 0)
    return Atom(AtomKind.EQ, t)


def cong(t: LinTerm, modulus: int, negated: bool = False) -> Formula:
    """t = 0 (mod modulus), or its negation."""
    if modulus <= 0:
        raise SortError("congruence modulus must be positive")
    for v in t.variables():
        if v.sort is not Sort.INT:
            raise SortError(f"congruence over Real variable {v.name}")
    scale = t.denominator_lcm()
    if scale != 1:
        t = t.scale(scale)
        modulus *= scale
    if not t.is_int_valued():
        raise SortError("congruence over a non-integer term")
    if modulus == 1:
        return BoolConst(not negated)
    if t.is_constant():
        holds = t.const.numerator % modulus == 0
        return BoolConst(holds != negated)
    g = math.gcd(t.content(), modulus)
    if g > 1:
        # g | t - c is then necessary
        if t.const.numerator % g != 0:
            return BoolConst(negated)
        t = t.scale(Fraction(1, g))
        modulus //= g
        if modulus == 1:
            return BoolConst(not negated)
    residue = (-t.const.numerator) % modulus
    kind = AtomKind.NDIV if negated else AtomKind.DIV
    return Atom(kind, t.without_const(), modulus, residue)


def rebuild_atom(kind: AtomKind, lhs: LinTerm, modulus: int | None, residue: int) -> Formula:
    if kind is AtomKind.LT:
        return lt(lhs)
    if kind is AtomKind.EQ:
        return eq(lhs)
    return cong(lhs - residue, modulus, negated=kind is AtomKind.NDIV)


def compare(rel: str, left: LinTerm, right: LinTerm, modulus: int | None = None) -> Formula:
    """A TermAtom, folded to a constant when both sides are constant."""
    d = left - right
    if d.is_constant():
        c = d.const
        if rel == "cong":
            return BoolConst(c.denominator == 1 and c.numerator % modulus == 0)
        return BoolConst({
            "<": c < 0, "<=": c <= 0, ">": c > 0, ">=": c >= 0,
            "=": c == 0, "distinct": c != 0}[rel])
    return TermAtom(rel, left, right, modulus)


# -- boolean smart constructors ---------------------------------------------


def conj(*fs: Formula | Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    for item in fs:
        for f in ((item,) if isinstance(item, Formula) else item):
            cls = type(f)
            if cls is And:
                out.extend(f.args)
            elif cls is BoolConst:
                if not f.value:
                    return FALSE
            else:
                out.append(f)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*fs: Formula | Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    for item in fs:
        for f in ((item,) if isinstance(item, Formula) else item):
            cls = type(f)
            if cls is Or:
                out.extend(f.args)
            elif cls is BoolConst:
                if f.value:
                    return TRUE
            else:
                out.append(f)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(f: Formula) -> Formula:
    if isinstance(f, BoolConst):
        return BoolConst(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def exists(vars_: Iterable[SortedVar], body: Formula) -> Formula:
    """Existential closure; drops unused variables and merges nested blocks."""
    vs = list(dict.fromkeys(vars_))
    if isinstance(body, BoolConst):
        return body
    if isinstance(body, Exists):
        inner = set(body.vars)
        vs = [v for v in vs if v not in inner] + list(body.vars)
        body = body.body
    if not vs:
        return body
    fv = _free(body)
    vs = [v for v in vs if v in fv]
    if not vs:
        return body
    return Exists(tuple(vs), body)


# -- traversal --------------------------------------------------------------


def is_atom(f: Formula) -> bool:
    return isinstance(f, (Atom, TermAtom)) or hasattr(f, "as_formula")


def atom_vars(f: Formula) -> frozenset[SortedVar]:
    if isinstance(f, Atom):
        return f.lhs.variables()
    if isinstance(f, TermAtom):
        return f.left.variables() | f.right.variables()
    if hasattr(f, "as_formula"):
        return atom_vars(f.as_formula())
    raise TypeError(f"not an atom: {f!r}")


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (Exists, ExistsRamsey)):
        return (f.body,)
    return ()


def iter_nodes(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def iter_atoms(f: Formula) -> Iterator[Formula]:
    for g in iter_nodes(f):
        if is_atom(g):
            yield g


def free_vars(f: Formula) -> set[SortedVar]:
    return set(_free(f))


def _free(f: Formula) -> frozenset[SortedVar]:
    # cached on composite nodes: large outputs share subformulas and get queried repeatedly
    if is_atom(f):
        return atom_vars(f)
    cached = f.__dict__.get("_fv") if hasattr(f, "__dict__") else None
    if cached is not None:
        return cached
    if isinstance(f, BoolConst):
        return frozenset()
    if isinstance(f, Not):
        out = _free(f.arg)
    elif isinstance(f, (And, Or)):
        acc: set[SortedVar] = set()
        for a in f.args:
            acc |= _free(a)
        out = frozenset(acc)
    elif isinstance(f, Exists):
        out = _free(f.body).difference(f.vars)
    elif isinstance(f, ExistsRamsey):
        out = _free(f.body).difference(f.xs, f.ys)
    else:
        raise TypeError(f"unknown formula node {type(f).__name__}")
    object.__setattr__(f, "_fv", out)
    return out


def all_vars(f: Formula) -> set[SortedVar]:
    out: set[SortedVar] = set()
    for g in iter_nodes(f):
        if is_atom(g):
            out |= atom_vars(g)
        elif isinstance(g, Exists):
            out.update(g.vars)
        elif isinstance(g, ExistsRamsey):
            out.update(g.xs)
            out.update(g.ys)
    return out


def count_vars(f: Formula) -> int:
    return len(all_vars(f))


def count_atoms(f: Formula) -> int:
    return sum(1 for _ in iter_atoms(f))


def size(f: Formula) -> int:
    return sum(1 for _ in iter_nodes(f))


def _bits(c: Fraction) -> int:
    return abs(c.numerator).bit_length() + (c.denominator.bit_length() if c.denominator != 1 else 0)


def _term_length(t: LinTerm) -> int:
    n = _bits(t.const) if t.const else 0
    for k, c in t.items():
        n += 1 + (_bits(c) if c != 1 else 0)
        if not isinstance(k, SortedVar):
            n += _term_length(k.arg)
    return n


def length(f: Formula) -> int:
    """Symbol count: connectives and binders one each, every variable
    occurrence one, constants and coefficients by bit length."""
    n = 0
    for g in iter_nodes(f):
        n += 1
        if isinstance(g, Atom):
            n += _term_length(g.lhs) + (g.modulus.bit_length() if g.modulus else 0)
        elif isinstance(g, TermAtom):
            n += _term_length(g.left) + _term_length(g.right)
        elif isinstance(g, Exists):
            n += len(g.vars)
        elif isinstance(g, ExistsRamsey):
            n += 2 * len(g.xs)
        elif is_atom(g):
            n += length(g.as_formula()) - 1
    return n


def has_ramsey(f: Formula) -> bool:
    return any(isinstance(g, ExistsRamsey) for g in iter_nodes(f))


def has_floor(f: Formula) -> bool:
    for a in iter_atoms(f):
        if isinstance(a, Atom) and a.lhs.has_floor():
            return True
        if isinstance(a, TermAtom) and (a.left.has_floor() or a.right.has_floor()):
            return True
        if hasattr(a, "as_formula") and has_floor(a.as_formula()):
            return True
    return False


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild f with every atom replaced by fn(atom). Binders are kept."""
    if isinstance(f, BoolConst):
        return f
    if is_atom(f):
        return fn(f)
    if isinstance(f, Not):
        return neg(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return conj(map_atoms(a, fn) for a in f.args)
    if isinstance(f, Or):
        return disj(map_atoms(a, fn) for a in f.args)
    if isinstance(f, Exists):
        return Exists(f.vars, map_atoms(f.body, fn))
    if isinstance(f, ExistsRamsey):
        return ExistsRamsey(f.xs, f.ys, map_atoms(f.body, fn))
    raise TypeError(f"unknown formula node {type(f).__name__}")


# -- fresh names --------------------------------------------------------------


class FreshNames:
    """Deterministic fresh variable supply avoiding every reserved name."""

    def __init__(self, taken: Iterable[str] = ()):
        self._taken = set(taken)
        self._counter = itertools.count()

    @classmethod
    def for_formulas(cls, *fs: Formula) -> "FreshNames":
        names = set()
        for f in fs:
            names |= {v.name for v in all_vars(f)}
        return cls(names)

    def reserve(self, names: Iterable[str]) -> None:
        self._taken.update(names)

    def var(self, hint: str, sort: Sort) -> SortedVar:
        while True:
            name = f"{hint}!{next(self._counter)}"
            if name not in self._taken:
                self._taken.add(name)
                return SortedVar(name, sort)

    def copy_of(self, v: SortedVar, hint: str | None = None) -> SortedVar:
        return self.var(hint or v.name.split("!")[0], v.sort)


# -- substitution ------------------------------------------------------------


def substitute(f: Formula, mapping: Mapping[SortedVar, LinTerm],
               names: FreshNames | None = None) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    m = {}
    for v, t in mapping.items():
        if not isinstance(t, LinTerm):
            t = LinTerm.constant(t) if isinstance(t, (int, Fraction)) else LinTerm.var(t)
        check_int_valued(v, t)
        m[v] = t
    if not m:
        return f
    if names is None:
        names = FreshNames.for_formulas(f)
        for t in m.values():
            names.reserve(v.name for v in t.variables())
        names.reserve(v.name for v in m)
    return _subst(f, m, names)


def _subst_atom(f: Formula, m: Mapping[SortedVar, LinTerm]) -> Formula:
    if isinstance(f, Atom):
        lhs = f.lhs.substitute(m)
        if lhs is f.lhs:
            return f
        return rebuild_atom(f.kind, lhs, f.modulus, f.residue)
    if isinstance(f, TermAtom):
        left, right = f.left.substitute(m), f.right.substitute(m)
        if left is f.left and right is f.right:
            return f
        return compare(f.rel, left, right, f.modulus)
    return f.substitute(m)


def _rebind(vars_, m, names):
    m = {k: v for k, v in m.items() if k not in set(vars_)}
    reach: set[SortedVar] = set()
    for t in m.values():
        reach |= t.variables()
    new_vars = []
    renames = {}
    for v in vars_:
        if v in reach:
            nv = names.copy_of(v)
            renames[v] = LinTerm.var(nv)
            new_vars.append(nv)
        else:
            new_vars.append(v)
    m.update(renames)
    return tuple(new_vars), m


def _subst(f: Formula, m, names) -> Formula:
    if isinstance(f, BoolConst):
        return f
    if is_atom(f):
        return _subst_atom(f, m)
    if _free(f).isdisjoint(m):
        return f
    if isinstance(f, Not):
        return neg(_subst(f.arg, m, names))
    if isinstance(f, And):
        return conj(_subst(a, m, names) for a in f.args)
    if isinstance(f, Or):
        return disj(_subst(a, m, names) for a in f.args)
    if isinstance(f, Exists):
        vs, m2 = _rebind(f.vars, m, names)
        return Exists(vs, _subst(f.body, m2, names)) if m2 else Exists(vs, f.body)
    if isinstance(f, ExistsRamsey):
        vs, m2 = _rebind(f.xs + f.ys, m, names)
        k = len(f.xs)
        body = _subst(f.body, m2, names) if m2 else f.body
        return ExistsRamsey(vs[:k], vs[k:], body)
    raise TypeError(f"unknown formula node {type(f).__name__}")


def rename(f: Formula, mapping: Mapping[SortedVar, SortedVar],
           names: FreshNames | None = None) -> Formula:
    return substitute(f, {k: LinTerm.var(v) for k, v in mapping.items()}, names)


# -- evaluation ---------------------------------------------------------------


def _eval_atom(f: Formula, asg) -> bool:
    if isinstance(f, Atom):
        val = f.lhs.evaluate(asg)
        if f.kind is AtomKind.LT:
            return val < 0
        if f.kind is AtomKind.EQ:
            return val == 0
        if val.denominator != 1:
            raise SortError("congruence evaluated on a non-integer value")
        holds = (val.numerator - f.residue) % f.modulus == 0
        return holds if f.kind is AtomKind.DIV else not holds
    if isinstance(f, TermAtom):
        a = f.left.evaluate(asg)
        b = f.right.evaluate(asg)
        if f.rel == "cong":
            d = a - b
            if d.denominator != 1:
                raise SortError("congruence evaluated on a non-integer value")
            return d.numerator % f.modulus == 0
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b,
                "=": a == b, "distinct": a != b}[f.rel]
    return _eval(f.as_formula(), asg)


def _eval(f: Formula, asg) -> bool:
    if isinstance(f, BoolConst):
        return f.value
    if is_atom(f):
        return _eval_atom(f, asg)
    if isinstance(f, Not):
        return not _eval(f.arg, asg)
    if isinstance(f, And):
        return all(_eval(a, asg) for a in f.args)
    if isinstance(f, Or):
        return any(_eval(a, asg) for a in f.args)
    raise UnsupportedFormula("cannot evaluate a quantified formula")


def evaluate(f: Formula, asg: Mapping[SortedVar, Number]) -> bool:
    """Truth value of a quantifier-free formula under a total assignment."""
    for v in free_vars(f):
        if v not in asg:
            raise KeyError(f"no value for variable {v.name}")
        if v.sort is Sort.INT and Fraction(asg[v]).denominator != 1:
            raise SortError(f"Int variable {v.name} assigned non-integer {asg[v]}")
    return _eval(f, asg)
